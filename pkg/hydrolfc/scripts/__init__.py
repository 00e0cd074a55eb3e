"""Command-line entry points of the hydrolfc package."""
