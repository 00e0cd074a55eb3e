from ._fuzzy import (  # noqa: F401
    TERMS,
    GENE_MIN,
    GENE_MAX,
    DEFAULT_SCALES,
    RULE_TABLE,
    negate_term,
    rule_formula,
    GeneQuad,
    BreakpointSet,
    MembershipFamily,
    RuleBase,
    DEFAULT_RULES,
    FuzzySystem,
    decode_quad,
    build_family,
    family_centers,
    membership_degrees,
    infer,
)
try:
    del _fuzzy  # noqa: F821
except NameError:
    pass
