"""Bookkeeping for the Grothendieck-Lefschetz decomposition of #M_{g,n}(F_q).

The point count splits as stable + unstable tautological + non-tautological.
Only the first two pieces are computable here, and the unstable piece only as
an envelope built from the a priori dimensions of R_n (the true images in
cohomology can only be smaller).  The non-tautological piece is carried as a
weight cutoff plus a log bound on total Betti numbers, never evaluated.

All logarithms are natural.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .exactcomb import graded_dimensions

__all__ = [
    "KPrimeReport",
    "TraceProfile",
    "cohomology_log_bound",
    "dimension_d",
    "hs_target",
    "kprime_inequality_margin",
    "kprime_search",
    "ratio_prediction",
    "stable_cutoff",
    "stable_trace_normalized",
    "subexp_constant",
    "trace_profile",
    "unstable_tail_bound",
    "unstable_tail_exact",
]

# exact factorial below this genus, log-gamma above
_EXACT_FACTORIAL_MAX_G = 50


def dimension_d(g: int, n: int) -> int:
    """Relative dimension 3g - 3 + n of M_{g,n}."""
    if g < 2:
        raise ValueError(f"d_(g,n) = 3g-3+n is only stated for g >= 2, got g={g}")
    if n < 0:
        raise ValueError("n must be nonnegative")
    return 3 * g - 3 + n


def stable_cutoff(g: int) -> int:
    """Largest j with coweight 2j in the stable range, floor((g-1)/3)."""
    return (g - 1) // 3


def _weighted_sum(n: int, q: int, lo: int, hi: int) -> Fraction:
    """sum_{j=lo}^{hi} q^{-j} dim R_n^{2j}, exact."""
    if hi < lo:
        return Fraction(0)
    dims = graded_dimensions(n, hi)
    acc = 0
    for j in range(lo, hi + 1):
        acc = acc * q + dims[j]
    # acc = sum_j dims[j] q^{hi-j}
    return Fraction(acc, q**hi)


def stable_trace_normalized(g: int, n: int, q: int) -> Fraction:
    """q^{-d} T^stable = sum_{j=0}^{floor((g-1)/3)} q^{-j} dim R_n^{2j}."""
    dimension_d(g, n)
    return _weighted_sum(n, q, 0, stable_cutoff(g))


def unstable_tail_exact(g: int, n: int, q: int) -> Fraction:
    """Envelope of |q^{-d} T^unstable|: sum over floor((g-1)/3) < j <= d."""
    d = dimension_d(g, n)
    return _weighted_sum(n, q, stable_cutoff(g) + 1, d)


def ratio_prediction(g: int, n: int, q: int) -> Fraction:
    """Stable-only estimate of #M_{g,n}(F_q) / #M_g(F_q)."""
    return Fraction(q) ** n * stable_trace_normalized(g, n, q) / stable_trace_normalized(g, 0, q)


def hs_target(n: int, q: int, depth: int = 400) -> Fraction:
    """HS_{R_n}(q^{-1/2}) truncated at coweight 2*depth (the limit of the stable trace)."""
    return _weighted_sum(n, q, 0, depth)


def subexp_constant(n: int, I: int) -> float:
    """Smallest c on the 0.001 grid with dim R_n^{2i} <= exp(c sqrt(i)) for 1 <= i <= I.

    Found by bisection over the grid, the predicate checked in log space.
    """
    if I < 1:
        raise ValueError("scan limit must be at least 1")
    dims = graded_dimensions(n, I)
    logs = [(math.log(dims[i]), math.sqrt(i)) for i in range(1, I + 1)]

    def ok(milli: int) -> bool:
        c = milli / 1000
        return all(lg <= c * s for lg, s in logs)

    hi = 1
    while not ok(hi):
        hi *= 2
    lo = -1  # ok(-1) is false unless every dimension is below 1, which never happens
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if mid >= 0 and ok(mid):
            hi = mid
        else:
            lo = mid
    return hi / 1000


def unstable_tail_bound(g: int, n: int, q: int, c: float | None = None) -> float:
    """sum_{j>floor((g-1)/3)}^{d} q^{-j} exp(c_n sqrt(j)), the subexponential envelope."""
    d = dimension_d(g, n)
    if c is None:
        c = subexp_constant(n, max(d, 1))
    lnq = math.log(q)
    return math.fsum(
        math.exp(c * math.sqrt(j) - j * lnq) for j in range(stable_cutoff(g) + 1, d + 1)
    )


def cohomology_log_bound(g: int, n: int) -> float:
    """log of (2+2g)^n (12g)!, the bound on total compactly supported Betti numbers."""
    if g < 1:
        raise ValueError("g must be at least 1")
    if n < 0:
        raise ValueError("n must be nonnegative")
    if g <= _EXACT_FACTORIAL_MAX_G:
        log_fact = math.log(math.factorial(12 * g))
    else:
        log_fact = math.lgamma(12 * g + 1)
    return n * math.log(2 + 2 * g) + log_fact


@dataclass(frozen=True)
class TraceProfile:
    g: int
    n: int
    q: int
    d: int
    stable_normalized: Fraction
    unstable_tail_exact: Fraction
    unstable_tail_bound: float
    cohomology_log_bound: float

    @property
    def weight_cutoff(self) -> int:
        """Exponent e such that every class outside the stable range has |Frobenius eigenvalue| < q^e."""
        return self.d - stable_cutoff(self.g)


def trace_profile(g: int, n: int, q: int) -> TraceProfile:
    d = dimension_d(g, n)
    profile = TraceProfile(
        g=g,
        n=n,
        q=q,
        d=d,
        stable_normalized=stable_trace_normalized(g, n, q),
        unstable_tail_exact=unstable_tail_exact(g, n, q),
        unstable_tail_bound=unstable_tail_bound(g, n, q),
        cohomology_log_bound=cohomology_log_bound(g, n),
    )
    assert profile.stable_normalized > 0
    assert profile.unstable_tail_exact >= 0
    return profile


# ---------------------------------------------------------------------------
# the q > g^K threshold
# ---------------------------------------------------------------------------


def kprime_inequality_margin(g: int, n: int, K: float) -> float:
    """LHS - RHS of (floor((g-1)/3) - g/6) log q > n log(2g+2) + 12g log(12g) at q = g^K.

    Positive means the inequality holds.
    """
    log_q = K * math.log(g)
    lhs = (stable_cutoff(g) - g / 6) * log_q
    rhs = n * math.log(2 * g + 2) + 12 * g * math.log(12 * g)
    return lhs - rhs


@dataclass
class KPrimeReport:
    """Outcome of a threshold search.

    ``g0`` is the least genus from which the inequality holds on every g up to
    ``g_max``.  ``first_satisfied`` is the least genus where it holds at all;
    the inequality is not monotone in g (the floor makes the left side depend
    on g mod 3), so ``intermittent`` lists the failures between the two.
    """

    K: float
    n: int
    g_max: int
    g0: int | None
    first_satisfied: int | None
    checked: int = 0
    violations: list[int] = field(default_factory=list)
    fails_at: list[int] = field(default_factory=list)
    intermittent: list[int] = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.g0 is not None

    @property
    def ok(self) -> bool:
        return self.found and not self.violations

    @property
    def monotone(self) -> bool:
        return not self.intermittent


def kprime_search(K: float, n: int, g_max: int) -> KPrimeReport:
    """Threshold g0 with the inequality true at q = g^K for all g in [g0, g_max].

    Every g from 2 to g_max is evaluated in log space.  The confirming sweep
    over [g0, g_max] re-evaluates independently and records any failure in
    ``violations``.
    """
    if K <= 144:
        raise ValueError(f"K must exceed 144, got {K}")
    if n < 0:
        raise ValueError("n must be nonnegative")
    if g_max < 2:
        raise ValueError("g_max must be at least 2")
    failures = [g for g in range(2, g_max + 1) if not kprime_inequality_margin(g, n, K) > 0]
    last_fail = failures[-1] if failures else 1
    g0 = last_fail + 1 if last_fail < g_max else None
    report = KPrimeReport(K=K, n=n, g_max=g_max, g0=g0, first_satisfied=None)
    failed = set(failures)
    report.first_satisfied = next((g for g in range(2, g_max + 1) if g not in failed), None)
    bound = g0 if g0 is not None else g_max + 1
    report.fails_at = [g for g in failures if g < bound]
    if report.first_satisfied is not None:
        report.intermittent = [g for g in report.fails_at if g > report.first_satisfied]
    if g0 is not None:
        for g in range(g0, g_max + 1):
            report.checked += 1
            if not kprime_inequality_margin(g, n, K) > 0:
                report.violations.append(g)
    return report
