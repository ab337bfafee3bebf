"""Point-count surrogates from random symplectic matrices, and the constraints
that an actual curve's counts must satisfy."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .sampling import SymplecticSample, traces

__all__ = [
    "ConstraintCheck",
    "ConstraintConfig",
    "PointCountSequence",
    "check_constraints",
    "constraint_masks",
    "default_pairs",
    "implied_point_counts",
    "point_count_array",
]

DISCRETENESS = "discreteness"
POSITIVITY = "positivity"
MORE_POSITIVITY = "more_positivity"


def default_pairs(m: int) -> tuple[tuple[int, int], ...]:
    """All (n1, n2) with n1 >= 1, n2 >= 2 and n1 * n2 <= m."""
    return tuple((a, b) for a in range(1, m + 1) for b in range(2, m + 1) if a * b <= m)


@dataclass(frozen=True)
class ConstraintConfig:
    """Which constraints to apply.

    ``discreteness_indices`` selects the k with |N_k - round(N_k)| <= epsilon
    enforced; ``None`` means all of 1..max_index jointly.
    """

    use_discreteness: bool = True
    epsilon: float = 0.05
    use_positivity: bool = True
    use_more_positivity: bool = True
    max_index: int = 6
    pairs: tuple[tuple[int, int], ...] | None = None
    discreteness_indices: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")
        if self.max_index < 1:
            raise ValueError("max_index must be at least 1")
        for a, b in self.resolved_pairs():
            if a < 1 or b < 1 or a * b > self.max_index:
                raise ValueError(f"pair {(a, b)} needs n1, n2 >= 1 and n1*n2 <= {self.max_index}")
        for k in self.resolved_indices():
            if not 1 <= k <= self.max_index:
                raise ValueError(f"discreteness index {k} outside 1..{self.max_index}")

    @classmethod
    def none(cls, max_index: int = 1) -> "ConstraintConfig":
        return cls(
            use_discreteness=False,
            use_positivity=False,
            use_more_positivity=False,
            max_index=max_index,
        )

    def resolved_pairs(self) -> tuple[tuple[int, int], ...]:
        return default_pairs(self.max_index) if self.pairs is None else tuple(map(tuple, self.pairs))

    def resolved_indices(self) -> tuple[int, ...]:
        if self.discreteness_indices is None:
            return tuple(range(1, self.max_index + 1))
        return tuple(self.discreteness_indices)

    def active(self) -> list[str]:
        names = []
        if self.use_discreteness:
            names.append(DISCRETENESS)
        if self.use_positivity:
            names.append(POSITIVITY)
        if self.use_more_positivity:
            names.append(MORE_POSITIVITY)
        return names

    def to_dict(self) -> dict:
        return {
            "use_discreteness": self.use_discreteness,
            "epsilon": self.epsilon,
            "use_positivity": self.use_positivity,
            "use_more_positivity": self.use_more_positivity,
            "max_index": self.max_index,
            "pairs": [list(p) for p in self.resolved_pairs()],
            "discreteness_indices": list(self.resolved_indices()),
        }


@dataclass(frozen=True)
class PointCountSequence:
    """N_k = q^k + 1 - q^{k/2} t_k for k = 1..m."""

    q: int
    values: tuple[float, ...]

    def __len__(self):
        return len(self.values)

    def __getitem__(self, k: int) -> float:
        """1-based: seq[k] is N_k."""
        if k < 1:
            raise IndexError(k)
        return self.values[k - 1]

    def within_weil(self, g: int, tol: float = 1e-9) -> bool:
        q = self.q
        return all(
            abs(n - q**k - 1) <= 2 * g * q ** (k / 2) * (1 + tol)
            for k, n in enumerate(self.values, start=1)
        )


def point_count_array(phases: np.ndarray, q: int, m: int) -> np.ndarray:
    """Batched N_k, shape (batch, m)."""
    k = np.arange(1, m + 1, dtype=float)
    return q**k + 1.0 - q ** (k / 2) * traces(phases, m)


def implied_point_counts(sample: SymplecticSample, q: int, m: int) -> PointCountSequence:
    if m < 1:
        raise ValueError("m must be at least 1")
    if q < 2:
        raise ValueError("q must be at least 2")
    row = point_count_array(sample.phases[None, :], q, m)[0]
    return PointCountSequence(q, tuple(float(x) for x in row))


def constraint_masks(N: np.ndarray, config: ConstraintConfig) -> dict[str, np.ndarray]:
    """Pass/fail per active constraint for a batch of sequences N (batch, >= max_index)."""
    if N.shape[1] < config.max_index:
        raise ValueError("sequence shorter than max_index")
    out = {}
    if config.use_discreteness:
        cols = np.array(config.resolved_indices()) - 1
        frac = np.abs(N[:, cols] - np.rint(N[:, cols]))
        out[DISCRETENESS] = np.all(frac <= config.epsilon, axis=1)
    if config.use_positivity:
        out[POSITIVITY] = N[:, 0] >= 0
    if config.use_more_positivity:
        ok = np.ones(N.shape[0], dtype=bool)
        for a, b in config.resolved_pairs():
            ok &= N[:, a * b - 1] >= N[:, a - 1]
        out[MORE_POSITIVITY] = ok
    return out


@dataclass(frozen=True)
class ConstraintCheck:
    accepted: bool
    violated: list[str] = field(default_factory=list)


def check_constraints(seq: PointCountSequence, config: ConstraintConfig, g: int) -> ConstraintCheck:
    """Apply the configured constraints to one sequence.

    Raises if ``seq`` leaves the Weil envelope for genus ``g``: such a
    sequence cannot come from USp(2g).
    """
    if len(seq) < config.max_index:
        raise ValueError("sequence shorter than max_index")
    if not seq.within_weil(g):
        raise ValueError(f"sequence violates the Weil envelope for g={g}")
    masks = constraint_masks(np.asarray([seq.values]), config)
    violated = [name for name, ok in masks.items() if not ok[0]]
    return ConstraintCheck(accepted=not violated, violated=violated)
