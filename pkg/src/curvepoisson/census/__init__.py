"""Exhaustive censuses of genus-1 and genus-2 curves over small finite fields."""

from .curves import (
    KINDS,
    CurveEquation,
    count_points,
    enumerate_curves,
    is_smooth,
    point_count,
    singular_points_bruteforce,
)
from .distribution import (
    CensusResult,
    WeightedDistribution,
    empirical_falling_moments,
    empirical_raw_moments,
    predict_higher_counts,
    run_census,
    weighted_distribution,
)
from .fields import GF, FiniteField, parse_field_spec
from .groups import GroupSpec, group_order, validate_orbits

__all__ = [
    "GF",
    "KINDS",
    "CensusResult",
    "CurveEquation",
    "FiniteField",
    "GroupSpec",
    "WeightedDistribution",
    "count_points",
    "empirical_falling_moments",
    "empirical_raw_moments",
    "enumerate_curves",
    "group_order",
    "is_smooth",
    "parse_field_spec",
    "point_count",
    "predict_higher_counts",
    "run_census",
    "singular_points_bruteforce",
    "validate_orbits",
    "weighted_distribution",
]
