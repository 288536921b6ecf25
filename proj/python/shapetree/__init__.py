"""Tree-based estimators for monotone and convex discrete densities."""

from ._shapetree import (
    ShapetreeError,
    assouad_default_params,
    assouad_density,
    estimate,
    family,
    hellinger_affinity,
    is_convex_non_increasing,
    is_non_increasing,
    mc_risk,
    minimum_distance_estimate,
    monotonize,
    rate,
    run_cli,
    sample,
    tv,
    vc_unions_intervals,
)

__all__ = [
    "ShapetreeError",
    "assouad_default_params",
    "assouad_density",
    "estimate",
    "family",
    "hellinger_affinity",
    "is_convex_non_increasing",
    "is_non_increasing",
    "mc_risk",
    "minimum_distance_estimate",
    "monotonize",
    "rate",
    "run_cli",
    "sample",
    "tv",
    "vc_unions_intervals",
]
