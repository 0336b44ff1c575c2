"""Swarm trust preference analysis: simplex LP, preference polytopes, group statistics."""

from ._core import (
    Error,
    Service,
    behaviors,
    chebyshev_center,
    confidence_delta,
    coverage_fraction,
    descriptor_names,
    extract_features,
    halfspace_from_pair,
    inv_norm_cdf,
    load_preferences,
    norm_cdf,
    simulate,
    solve_cohesion,
    solve_distinctiveness,
    solve_lp,
    trust_value,
)

__all__ = [
    "Error",
    "Service",
    "behaviors",
    "chebyshev_center",
    "confidence_delta",
    "coverage_fraction",
    "descriptor_names",
    "extract_features",
    "halfspace_from_pair",
    "inv_norm_cdf",
    "load_preferences",
    "norm_cdf",
    "simulate",
    "solve_cohesion",
    "solve_distinctiveness",
    "solve_lp",
    "trust_value",
]
