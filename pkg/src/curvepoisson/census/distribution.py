"""Groupoid-weighted point-count distributions from exhaustive enumeration.

Each smooth normal-form equation carries mass 1/|G|.  Since the orbit of a
curve's equations has size |G|/#Aut(C), summing over equations gives every
isomorphism class weight 1/#Aut(C).
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..exactcomb import MomentVector
from .curves import GENUS, KINDS, candidate_block, candidate_count, count_points, smooth_mask
from .fields import FiniteField, GF
from .groups import GroupSpec, group_order

__all__ = [
    "CensusResult",
    "WeightedDistribution",
    "empirical_falling_moments",
    "empirical_raw_moments",
    "hasse_weil_ok",
    "predict_higher_counts",
    "run_census",
    "weighted_distribution",
]


def _falling(n: int, k: int) -> int:
    return math.prod(range(n - k + 1, n + 1))


@dataclass
class WeightedDistribution:
    kind: str
    q: int
    genus: int
    group: GroupSpec
    counts: dict[int, int]

    def __post_init__(self):
        if any(c < 0 for c in self.counts.values()):
            raise ValueError("counts must be nonnegative")

    @property
    def masses(self) -> dict[int, Fraction]:
        return {n: Fraction(c, self.group.order) for n, c in sorted(self.counts.items())}

    @property
    def total_mass(self) -> Fraction:
        return Fraction(sum(self.counts.values()), self.group.order)

    @property
    def num_equations(self) -> int:
        return sum(self.counts.values())

    def within_weil(self) -> bool:
        lim = 4 * self.genus**2 * self.q
        return all((n - self.q - 1) ** 2 <= lim for n, c in self.counts.items() if c)


def empirical_falling_moments(dist: WeightedDistribution, n_max: int) -> MomentVector:
    """E[N(N-1)...(N-n+1)] under the normalised groupoid measure."""
    total = dist.total_mass
    if total == 0:
        raise ValueError("distribution has zero total mass")
    masses = dist.masses
    return MomentVector(
        {k: sum(m * _falling(n, k) for n, m in masses.items()) / total for k in range(1, n_max + 1)}
    )


def empirical_raw_moments(dist: WeightedDistribution, n_max: int) -> MomentVector:
    total = dist.total_mass
    if total == 0:
        raise ValueError("distribution has zero total mass")
    masses = dist.masses
    return MomentVector(
        {k: sum(m * n**k for n, m in masses.items()) / total for k in range(1, n_max + 1)}
    )


def hasse_weil_ok(counts: np.ndarray, q: int, g: int, k: int) -> np.ndarray:
    """|N_k - q^k - 1| <= 2g q^{k/2}, compared in squared integer form."""
    dev = counts.astype(object) - (q**k + 1)
    return np.array([d * d <= 4 * g * g * q**k for d in dev], dtype=bool)


def predict_higher_counts(N1: int, N2: int, q: int) -> tuple[int, int]:
    """(N_3, N_4) of a genus-2 curve from (N_1, N_2).

    The reciprocal Frobenius roots have power sums s_k = q^k + 1 - N_k and
    elementary symmetric functions e1 = s1, e2 = (s1^2 - s2)/2, e3 = q e1,
    e4 = q^2; Newton's identities give s3 and s4.
    """
    s1 = q + 1 - N1
    s2 = q * q + 1 - N2
    e1 = Fraction(s1)
    e2 = Fraction(s1 * s1 - s2, 2)
    e3 = q * e1
    e4 = Fraction(q * q)
    s3 = e1 * s2 - e2 * s1 + 3 * e3
    s4 = e1 * s3 - e2 * s2 + e3 * s1 - 4 * e4
    n3, n4 = q**3 + 1 - s3, q**4 + 1 - s4
    if n3.denominator != 1 or n4.denominator != 1:
        raise ValueError("non-integral prediction; (N1, N2) is not from a genus-2 curve")
    return int(n3), int(n4)


# ---------------------------------------------------------------------------
# census driver
# ---------------------------------------------------------------------------


@dataclass
class CensusResult:
    distribution: WeightedDistribution
    field: FiniteField
    candidates: int
    direct_falling_sums: dict[int, int]
    hasse_weil_checks: int
    hasse_weil_failures: int
    zeta_checks: int
    zeta_failures: int
    max_k: int
    flags: list[str] = field(default_factory=list)

    def direct_falling_moments(self, n_max: int) -> MomentVector:
        """Falling moments from per-equation sums, independent of the histogram."""
        total = self.distribution.num_equations
        if total == 0:
            raise ValueError("no smooth equations")
        return MomentVector(
            {k: Fraction(self.direct_falling_sums[k], total) for k in range(1, n_max + 1)}
        )

    @property
    def consistent(self) -> bool:
        return self.hasse_weil_failures == 0 and self.zeta_failures == 0


def _scan_unit(args):
    kind, p, k, prefix, max_k, n_max = args
    F = GF(p, k)
    g = GENUS[kind]
    rows = candidate_block(kind, F, prefix)
    rows = rows[smooth_mask(kind, F, rows)]
    counts = {j: count_points(kind, F, rows, j) for j in range(1, max_k + 1)}
    hw_checks = hw_fail = 0
    for j, Nj in counts.items():
        ok = hasse_weil_ok(Nj, F.q, g, j)
        hw_checks += ok.size
        hw_fail += int((~ok).sum())
    zeta_checks = zeta_fail = 0
    if kind == "genus2" and max_k >= 4:
        for n1, n2, n3, n4 in zip(*(counts[j].tolist() for j in range(1, 5))):
            zeta_checks += 1
            try:
                if predict_higher_counts(n1, n2, F.q) != (n3, n4):
                    zeta_fail += 1
            except ValueError:
                zeta_fail += 1
    N1 = counts[1].tolist()
    hist = Counter(N1)
    direct = {j: sum(_falling(n, j) for n in N1) for j in range(1, n_max + 1)}
    return hist, direct, hw_checks, hw_fail, zeta_checks, zeta_fail


def run_census(
    kind: str, F: FiniteField, n_max: int = 4, max_k: int = 4, workers: int = 1
) -> CensusResult:
    """Enumerate, count points over F_{q^k} for k <= max_k, and weight.

    Work units are the q leading-coefficient prefixes; their partial results
    are merged in prefix order, so the outcome does not depend on ``workers``.
    """
    if kind not in KINDS:
        raise ValueError(f"unsupported kind {kind!r}")
    if not 1 <= max_k <= 4:
        raise ValueError("max_k must be in 1..4")
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    if workers < 1:
        raise ValueError("workers must be at least 1")
    candidates = candidate_count(kind, F)
    candidate_block(kind, F, 0)  # size guard before spawning work
    jobs = [(kind, F.p, F.k, prefix, max_k, n_max) for prefix in range(F.q)]
    if workers == 1:
        parts = [_scan_unit(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_scan_unit, jobs))

    hist: Counter = Counter()
    direct = {j: 0 for j in range(1, n_max + 1)}
    hw_checks = hw_fail = zeta_checks = zeta_fail = 0
    for h, d, a, b, c, e in parts:
        hist.update(h)
        for j, v in d.items():
            direct[j] += v
        hw_checks += a
        hw_fail += b
        zeta_checks += c
        zeta_fail += e
    if hw_fail:
        # a smooth curve outside the Weil envelope means the smoothness predicate is wrong
        raise RuntimeError(f"{hw_fail} point counts violate the Hasse-Weil bound")
    dist = WeightedDistribution(
        kind=kind,
        q=F.q,
        genus=GENUS[kind],
        group=group_order(kind, F),
        counts=dict(sorted(hist.items())),
    )
    flags = []
    if dist.num_equations == 0:
        flags.append("no_smooth_equations")
    return CensusResult(
        distribution=dist,
        field=F,
        candidates=candidates,
        direct_falling_sums=direct,
        hasse_weil_checks=hw_checks,
        hasse_weil_failures=hw_fail,
        zeta_checks=zeta_checks,
        zeta_failures=zeta_fail,
        max_k=max_k,
        flags=flags,
    )


def weighted_distribution(kind: str, F: FiniteField, workers: int = 1) -> WeightedDistribution:
    return run_census(kind, F, n_max=0, max_k=1, workers=workers).distribution
