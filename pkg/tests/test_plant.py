"""Tests for the plant model of hydrolfc."""

import math
from unittest import TestCase
from dataclasses import replace

import numpy as np
import pytest

from hydrolfc.errors import DomainError
from hydrolfc.plant import (
    TurbineRating,
    PlantParams,
    PlantState,
    SlcLadder,
    turbine_power,
    slc_quantize,
    mechanical_power,
    step_plant,
    measure_frequency,
)


class TestTurbinePower(TestCase):
    """Checks the theoretical turbine power P = Q*h*g*ef."""

    def test_unit_flow(self):
        self.assertAlmostEqual(
            turbine_power(TurbineRating(1, 10, 1)), 98.1, places=9)

    def test_zero_efficiency(self):
        self.assertEqual(turbine_power(TurbineRating(5, 10, 0)), 0)

    def test_default_rating(self):
        self.assertAlmostEqual(
            turbine_power(TurbineRating(5, 10, 0.91)), 446.355, places=9)

    def test_bad_ratings(self):
        with self.assertRaises(DomainError):
            TurbineRating(-1, 10, 0.9)
        with self.assertRaises(DomainError):
            TurbineRating(1, -10, 0.9)
        with self.assertRaises(DomainError):
            TurbineRating(1, 10, 1.2)
        with self.assertRaises(DomainError):
            TurbineRating(1, 10, 0.9, gravity=9.8)


class TestSlcQuantize(TestCase):
    """Checks the nearest-code mapping of the dump-load ladder."""

    def test_ladder_constants(self):
        ladder = SlcLadder()
        self.assertEqual(ladder.max_code, 255)
        self.assertEqual(ladder.max_kw, 446.25)

    def test_examples(self):
        self.assertEqual(slc_quantize(0.0), (0, 0.0))
        self.assertEqual(slc_quantize(446.25), (255, 446.25))
        self.assertEqual(slc_quantize(2.6), (1, 1.75))
        self.assertEqual(slc_quantize(900.0), (255, 446.25))
        self.assertEqual(slc_quantize(-20.0), (0, 0.0))

    def test_nearest_code_oracle(self):
        codes = np.arange(256)
        for surplus in (0.87, 0.88, 100.0, 223.9, 445.0):
            best = codes[np.argmin(np.abs(surplus - codes * 1.75))]
            code, absorbed = slc_quantize(surplus)
            self.assertEqual(code, best)
            self.assertEqual(absorbed, best * 1.75)

    def test_quantization_error_sweep(self):
        surplus = np.linspace(0, 446.25, 10000)
        code, absorbed = slc_quantize(surplus)
        self.assertTrue(np.all(np.abs(absorbed - surplus) <= 0.875 + 1e-9))
        self.assertTrue(np.all((code >= 0) & (code <= 255)))

    def test_non_finite(self):
        with self.assertRaises(DomainError):
            slc_quantize(float('nan'))
        with self.assertRaises(DomainError):
            slc_quantize(np.array([1.0, np.inf]))


def _run(params, steps, u_gate=0.0, dp_load=0.0, state=None):
    if state is None:
        state = PlantState()
    trajectory = []
    for _ in range(steps):
        state = step_plant(state, u_gate, dp_load, params)
        trajectory.append(state.df)
    return state, np.array(trajectory)


class TestStepPlant(TestCase):
    """Checks the dynamics of the linearized plant."""

    def test_equilibrium_is_fixed(self):
        params = PlantParams()
        state, traj = _run(params, 2000)
        self.assertTrue(np.all(traj == 0))
        self.assertEqual(state.gov, 0)
        self.assertEqual(state.turbine, 0)
        self.assertAlmostEqual(state.t, 2.0, places=9)

    def test_load_step_steady_state(self):
        params = PlantParams()
        state, _ = _run(params, 60000, dp_load=0.1)
        expected = -0.1 / params.damping
        self.assertLess(abs(state.df - expected), 0.005 * abs(expected))

    def test_non_minimum_phase_turbine(self):
        params = PlantParams()
        state = PlantState()
        powers = []
        for _ in range(20000):
            state = step_plant(state, 0.1, 0.0, params)
            powers.append(mechanical_power(state))
        self.assertLess(powers[0], 0)
        self.assertLess(min(powers[:200]), -0.01)
        self.assertAlmostEqual(powers[-1], 0.1, places=4)

    def test_linearity(self):
        params = PlantParams()
        state_1, traj_1 = _run(params, 3000, u_gate=0.05, dp_load=0.02)
        state_3, traj_3 = _run(params, 3000, u_gate=0.15, dp_load=0.06)
        np.testing.assert_allclose(traj_3, 3 * traj_1, rtol=1e-9, atol=1e-15)
        self.assertAlmostEqual(state_3.turbine, 3 * state_1.turbine)

    def test_dt_halving(self):
        coarse, fine = PlantParams(dt=0.001), PlantParams(dt=0.0005)
        _, traj_c = _run(coarse, 10000, u_gate=0.1, dp_load=0.05)
        _, traj_f = _run(fine, 20000, u_gate=0.1, dp_load=0.05)
        peak_c = np.max(np.abs(traj_c))
        peak_f = np.max(np.abs(traj_f))
        self.assertLess(abs(peak_c - peak_f), 0.01 * peak_f)

    def test_zero_damping_integrates(self):
        params = PlantParams(damping=0.0)
        state, _ = _run(params, 1000, dp_load=0.06)
        self.assertAlmostEqual(state.df, -0.06 * 1.0 / 6.0, places=9)

    def test_batch_matches_scalar(self):
        params = PlantParams()
        batch = PlantState.at_rest(3)
        loads = np.array([0.0, 0.1, -0.1])
        for _ in range(500):
            batch = step_plant(batch, 0.0, loads, params)
        single, _ = _run(params, 500, dp_load=0.1)
        self.assertEqual(batch.df[0], 0.0)
        self.assertEqual(batch.df[1], single.df)
        self.assertEqual(batch.df[2], -single.df)

    def test_non_finite_input(self):
        with self.assertRaises(DomainError):
            step_plant(PlantState(), float('nan'), 0.0, PlantParams())
        with self.assertRaises(DomainError):
            step_plant(PlantState(df=float('inf')), 0.0, 0.0, PlantParams())


class TestPlantParams(TestCase):

    def test_fixed_nominal_frequency(self):
        with self.assertRaises(DomainError):
            PlantParams(f_base=60.0)

    def test_step_guard(self):
        with self.assertRaises(DomainError):
            PlantParams(dt=0.05)
        with self.assertRaises(DomainError):
            PlantParams(inertia=0.0)
        with self.assertRaises(DomainError):
            PlantParams(damping=-1.0)


@pytest.mark.parametrize('df, tau, expected', [
    (0.0, 0.0, 0.0),
    (0.0, 0.02, 0.0),
    (0.01, 0.0, 0.5),
    (0.01, 0.02, 0.5 * (1 - math.exp(-0.05))),
])
def test_measure_frequency(df, tau, expected):
    reading = measure_frequency(PlantState(df=df), PlantParams(), tau)
    assert reading == pytest.approx(expected, rel=1e-12, abs=1e-15)


def test_measure_frequency_lag_converges():
    params = PlantParams()
    state = PlantState(df=0.01)
    for _ in range(400):
        state = replace(
            state, pll_hz=measure_frequency(state, params, pll_tau=0.02))
    assert state.pll_hz == pytest.approx(0.5, rel=1e-6)


def test_measure_frequency_bad_tau():
    with pytest.raises(DomainError):
        measure_frequency(PlantState(), PlantParams(), -0.1)
