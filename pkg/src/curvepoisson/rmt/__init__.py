"""Random-matrix side: Haar USp(2g) sampling, constraints, experiments."""

from .constraints import (
    ConstraintCheck,
    ConstraintConfig,
    PointCountSequence,
    check_constraints,
    implied_point_counts,
)
from .experiment import ExperimentReport, compare_to_poisson, run_experiment, weil_window
from .sampling import SymplecticSample, sample_haar_usp, sample_phases

__all__ = [
    "ConstraintCheck",
    "ConstraintConfig",
    "ExperimentReport",
    "PointCountSequence",
    "SymplecticSample",
    "check_constraints",
    "compare_to_poisson",
    "implied_point_counts",
    "run_experiment",
    "sample_haar_usp",
    "sample_phases",
    "weil_window",
]
