"""Constrained USp(2g) experiment and comparison against Poisson(lambda).

Samples are drawn in fixed-size chunks; chunk ``c`` uses a Philox stream
keyed by ``(seed, c)``.  Workers only decide who computes which chunk, and
chunk results are merged in chunk order, so the report does not depend on
the worker count.
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from ..exactcomb import lambda_of_q, poisson_pmf_table, predicted_moment
from .constraints import ConstraintConfig, constraint_masks, point_count_array
from .sampling import sample_phases

__all__ = [
    "ExperimentReport",
    "PoissonComparison",
    "compare_to_poisson",
    "run_experiment",
    "weil_window",
]

CHUNK_SIZE = 4096


def weil_window(q: int, g: int) -> tuple[int, int]:
    """Integers allowed for #C(F_q) by the Weil bound, clipped at 0."""
    # with r = floor(2g sqrt q): ceil(q+1-2g sqrt q) = q+1-r whether or not r is exact
    root = math.isqrt(4 * g * g * q)
    return max(0, q + 1 - root), q + 1 + root


@dataclass
class PoissonComparison:
    tv_distance: float
    moment_discrepancies: list[float]
    window: tuple[int, int]
    reference_mass_outside_window: float
    histogram_mass_outside_window: float


def compare_to_poisson(
    histogram: Mapping[int, float], lam, window: tuple[int, int], k_max: int = 4
) -> PoissonComparison:
    """TV distance and raw-moment gaps against Poisson(lam) restricted to ``window``.

    The reference is renormalised on the window; histogram entries outside
    the window count fully toward the distance.
    """
    total = float(sum(histogram.values()))
    if not histogram or total <= 0:
        raise ValueError("histogram is empty")
    lo, hi = window
    if hi < lo:
        raise ValueError("empty window")
    pmf = poisson_pmf_table(Fraction(lam), hi, precision=30)
    ref = {n: float(pmf[n].center) for n in range(lo, hi + 1)}
    inside = math.fsum(ref.values())
    ref = {n: v / inside for n, v in ref.items()}
    emp = {int(n): float(c) / total for n, c in histogram.items()}
    support = sorted(set(ref) | set(emp))
    tv = 0.5 * math.fsum(abs(emp.get(n, 0.0) - ref.get(n, 0.0)) for n in support)
    gaps = []
    for k in range(1, k_max + 1):
        e = math.fsum(p * n**k for n, p in emp.items())
        r = math.fsum(p * n**k for n, p in ref.items())
        gaps.append(e - r)
    outside_hist = math.fsum(p for n, p in emp.items() if not lo <= n <= hi)
    return PoissonComparison(
        tv_distance=tv,
        moment_discrepancies=gaps,
        window=(lo, hi),
        reference_mass_outside_window=max(0.0, 1.0 - inside),
        histogram_mass_outside_window=outside_hist,
    )


def _fraction_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


@dataclass
class ExperimentReport:
    g: int
    q: int
    seed: int
    method: str
    config: ConstraintConfig
    num_samples: int
    num_accepted: int
    histogram: dict[int, int]
    raw_moments: list[Fraction]
    falling_moments: list[Fraction]
    reference_raw_moments: list[Fraction]
    reference_falling_moments: list[Fraction]
    violations: dict[str, int]
    retries: int
    mean_unrounded_n1: float | None
    comparison: PoissonComparison | None
    flags: list[str] = field(default_factory=list)

    @property
    def acceptance_rate(self) -> float:
        return self.num_accepted / self.num_samples

    def to_dict(self) -> dict:
        comp = None
        if self.comparison is not None:
            c = self.comparison
            comp = {
                "tv_distance": c.tv_distance,
                "moment_discrepancies": c.moment_discrepancies,
                "window": list(c.window),
                "reference_mass_outside_window": c.reference_mass_outside_window,
                "histogram_mass_outside_window": c.histogram_mass_outside_window,
            }
        return {
            "g": self.g,
            "q": self.q,
            "seed": self.seed,
            "method": self.method,
            "constraints": self.config.to_dict(),
            "num_samples": self.num_samples,
            "num_accepted": self.num_accepted,
            "acceptance_rate": self.acceptance_rate,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "raw_moments": [_fraction_str(x) for x in self.raw_moments],
            "falling_moments": [_fraction_str(x) for x in self.falling_moments],
            "reference_raw_moments": [_fraction_str(x) for x in self.reference_raw_moments],
            "reference_falling_moments": [_fraction_str(x) for x in self.reference_falling_moments],
            "violations": dict(sorted(self.violations.items())),
            "retries": self.retries,
            "mean_unrounded_n1": self.mean_unrounded_n1,
            "comparison": comp,
            "flags": list(self.flags),
        }


def _chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, chunk])))


def _run_chunk(args) -> tuple[Counter, dict[str, int], int, int, float]:
    g, q, config, size, seed, chunk, method = args
    rng = _chunk_rng(seed, chunk)
    phases, retries = sample_phases(g, size, rng, method)
    N = point_count_array(phases, q, config.max_index)
    masks = constraint_masks(N, config)
    accepted = np.ones(size, dtype=bool)
    violations = {}
    for name, ok in masks.items():
        violations[name] = int((~ok).sum())
        accepted &= ok
    n1 = N[accepted, 0]
    hist = Counter(int(v) for v in np.rint(n1))
    return hist, violations, retries, int(accepted.sum()), math.fsum(n1.tolist())


def run_experiment(
    g: int,
    q: int,
    config: ConstraintConfig,
    num_samples: int,
    seed: int,
    n_max: int = 4,
    method: str = "matrix",
    workers: int = 1,
) -> ExperimentReport:
    """Draw, filter, histogram rounded N_1 and compare with Poisson(lambda(q))."""
    if num_samples < 1:
        raise ValueError("num_samples must be at least 1")
    if g < 1:
        raise ValueError("g must be at least 1")
    if workers < 1:
        raise ValueError("workers must be at least 1")
    lam = lambda_of_q(q)
    sizes = [CHUNK_SIZE] * (num_samples // CHUNK_SIZE)
    if num_samples % CHUNK_SIZE:
        sizes.append(num_samples % CHUNK_SIZE)
    jobs = [(g, q, config, size, seed, c, method) for c, size in enumerate(sizes)]
    if workers == 1 or len(jobs) == 1:
        results = [_run_chunk(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_chunk, jobs))

    hist: Counter = Counter()
    violations = {name: 0 for name in config.active()}
    retries = 0
    accepted = 0
    n1_sums = []
    for h, v, r, a, s in results:
        hist.update(h)
        for name, count in v.items():
            violations[name] += count
        retries += r
        accepted += a
        n1_sums.append(s)

    ref_raw = [predicted_moment(k, q) for k in range(1, n_max + 1)]
    ref_falling = [lam**k for k in range(1, n_max + 1)]
    flags = []
    if accepted == 0:
        flags.append("no_accepted_samples")
        return ExperimentReport(
            g, q, seed, method, config, num_samples, 0, {}, [], [], ref_raw, ref_falling,
            violations, retries, None, None, flags,
        )
    raw = [Fraction(sum(c * n**k for n, c in hist.items()), accepted) for k in range(1, n_max + 1)]
    falling = [
        Fraction(sum(c * math.prod(range(n - k + 1, n + 1)) for n, c in hist.items()), accepted)
        for k in range(1, n_max + 1)
    ]
    comparison = compare_to_poisson(hist, lam, weil_window(q, g), k_max=n_max)
    return ExperimentReport(
        g=g,
        q=q,
        seed=seed,
        method=method,
        config=config,
        num_samples=num_samples,
        num_accepted=accepted,
        histogram=dict(sorted(hist.items())),
        raw_moments=raw,
        falling_moments=falling,
        reference_raw_moments=ref_raw,
        reference_falling_moments=ref_falling,
        violations=violations,
        retries=retries,
        mean_unrounded_n1=math.fsum(n1_sums) / accepted,
        comparison=comparison,
        flags=flags,
    )
