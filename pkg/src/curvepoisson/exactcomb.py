"""Exact combinatorics behind the Poisson point-count predictions.

Everything here works in exact rationals (:class:`fractions.Fraction`) or in
certified balls (a dyadic centre plus an explicit error radius).  Nothing
returns a bare float for a quantity that is exact.

The tautological ring ``R_n`` is the polynomial ring on ``kappa_1, kappa_2, ...``
(degree ``2j``) and ``psi_1 .. psi_n`` (degree 2).  Its Hilbert series is

    HS_{R_n}(z) = prod_{i=1}^n 1/(1-z^2) * prod_{j>=1} 1/(1-z^{2j})

and the graded dimensions ``dim R_n^{2j}`` drive the stable trace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

Rational = Union[int, Fraction]

__all__ = [
    "Ball",
    "MomentVector",
    "TruncatedSeries",
    "exp_ball",
    "falling_from_raw",
    "graded_dimensions",
    "hilbert_series",
    "hilbert_series_from_factors",
    "hs_ratio_closed_form",
    "lambda_of_q",
    "multiset_series",
    "partition_numbers",
    "partition_series",
    "poisson_moment_by_summation",
    "poisson_pmf",
    "poisson_pmf_table",
    "predicted_falling_moment",
    "predicted_moment",
    "raw_from_falling",
    "stirling1",
    "stirling2",
    "truncated_hs_ratio",
]


# ---------------------------------------------------------------------------
# truncated power series
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TruncatedSeries:
    """Prefix ``c_0 + c_1 z + ... + c_D z^D`` of a power series, exact coefficients."""

    coefficients: tuple[Fraction, ...]

    def __post_init__(self):
        if not self.coefficients:
            raise ValueError("a truncated series needs at least the constant term")
        object.__setattr__(
            self, "coefficients", tuple(Fraction(c) for c in self.coefficients)
        )

    @property
    def truncation_order(self) -> int:
        return len(self.coefficients) - 1

    def __len__(self):
        return len(self.coefficients)

    def __getitem__(self, degree: int) -> Fraction:
        if degree < 0:
            raise IndexError(degree)
        if degree > self.truncation_order:
            raise IndexError(f"degree {degree} beyond truncation order {self.truncation_order}")
        return self.coefficients[degree]

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        order = min(self.truncation_order, other.truncation_order)
        a, b = self.coefficients, other.coefficients
        out = []
        for k in range(order + 1):
            out.append(sum((a[i] * b[k - i] for i in range(k + 1)), Fraction(0)))
        return TruncatedSeries(tuple(out))

    def stretch(self, k: int) -> "TruncatedSeries":
        """Substitute ``z -> z**k``; the truncation order scales by ``k``."""
        if k < 1:
            raise ValueError("stretch factor must be positive")
        out = [Fraction(0)] * (k * self.truncation_order + 1)
        for i, c in enumerate(self.coefficients):
            out[k * i] = c
        return TruncatedSeries(tuple(out))

    def evaluate(self, x: Rational) -> Fraction:
        """Value of the truncated polynomial at a rational point (Horner)."""
        x = Fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def odd_coefficients_vanish(self) -> bool:
        return all(c == 0 for c in self.coefficients[1::2])


# ---------------------------------------------------------------------------
# partitions, multisets, Hilbert series
# ---------------------------------------------------------------------------


def partition_numbers(D: int) -> list[int]:
    """p(0), ..., p(D) by Euler's pentagonal-number recurrence."""
    if D < 0:
        raise ValueError("D must be nonnegative")
    p = [1] + [0] * D
    for m in range(1, D + 1):
        total = 0
        k = 1
        while True:
            g1 = k * (3 * k - 1) // 2
            if g1 > m:
                break
            sign = 1 if k % 2 else -1
            total += sign * p[m - g1]
            g2 = k * (3 * k + 1) // 2
            if g2 <= m:
                total += sign * p[m - g2]
            k += 1
        p[m] = total
    return p


def partition_series(D: int) -> TruncatedSeries:
    """P(z) = sum p(j) z^j truncated at degree D."""
    return TruncatedSeries(tuple(partition_numbers(D)))


def multiset_series(n: int, D: int) -> TruncatedSeries:
    """Q_n(z) = sum_j C(n+j-1, j) z^j, the multiset counts on n elements."""
    if n < 0 or D < 0:
        raise ValueError("n and D must be nonnegative")
    if n == 0:
        return TruncatedSeries((1,) + (0,) * D)
    return TruncatedSeries(tuple(math.comb(n + j - 1, j) for j in range(D + 1)))


@lru_cache(maxsize=64)
def _dims_unmarked(D: int) -> tuple[int, ...]:
    # prod_{j=1}^{D} 1/(1-w^j) expanded factor by factor; factors with j > D
    # cannot reach degree <= D.
    c = [1] + [0] * D
    for j in range(1, D + 1):
        for i in range(j, D + 1):
            c[i] += c[i - j]
    return tuple(c)


@lru_cache(maxsize=256)
def graded_dimensions(n: int, D: int) -> tuple[int, ...]:
    """dim R_n^{2j} for j = 0..D, as exact integers.

    Built from the product of geometric factors: each psi factor 1/(1-w)
    is a running prefix sum.
    """
    if n < 0 or D < 0:
        raise ValueError("n and D must be nonnegative")
    if n == 0:
        return _dims_unmarked(D)
    prev = graded_dimensions(n - 1, D)
    out = []
    acc = 0
    for c in prev:
        acc += c
        out.append(acc)
    return tuple(out)


def hilbert_series(n: int, D: int) -> TruncatedSeries:
    """HS_{R_n}(z) graded by z, truncated at degree 2D.

    Coefficient of z^{2i} is dim R_n^{2i}; odd coefficients are zero.
    """
    return TruncatedSeries(tuple(graded_dimensions(n, D))).stretch(2)


def hilbert_series_from_factors(n: int, D: int) -> TruncatedSeries:
    """Q_n(z^2) * P(z^2), the same series via the multiset/partition factorization."""
    return (multiset_series(n, D) * partition_series(D)).stretch(2)


# ---------------------------------------------------------------------------
# lambda, Stirling numbers, predicted moments
# ---------------------------------------------------------------------------


def lambda_of_q(q: int) -> Fraction:
    """The conjectured Poisson mean q + 1 + 1/(q-1)."""
    if isinstance(q, bool) or not isinstance(q, int):
        raise TypeError("q must be an integer")
    if q < 2:
        raise ValueError(f"q must be at least 2, got {q}")
    lam = q + 1 + Fraction(1, q - 1)
    assert lam == Fraction(q * q, q - 1)
    return lam


@lru_cache(maxsize=None)
def _stirling2_row(n: int) -> tuple[int, ...]:
    if n == 0:
        return (1,)
    prev = _stirling2_row(n - 1)
    row = [0] * (n + 1)
    for k in range(1, n + 1):
        below = prev[k] if k < len(prev) else 0
        row[k] = k * below + prev[k - 1]
    return tuple(row)


def stirling2(n: int, k: int) -> int:
    """Stirling number of the second kind {n k}: set partitions into k blocks."""
    if n < 1 or k < 1 or k > n:
        raise ValueError(f"need 1 <= k <= n, got n={n}, k={k}")
    return _stirling2_row(n)[k]


@lru_cache(maxsize=None)
def _stirling1_row(n: int) -> tuple[int, ...]:
    if n == 0:
        return (1,)
    prev = _stirling1_row(n - 1)
    row = [0] * (n + 1)
    for k in range(1, n + 1):
        below = prev[k] if k < len(prev) else 0
        row[k] = prev[k - 1] - (n - 1) * below
    return tuple(row)


def stirling1(n: int, k: int) -> int:
    """Signed Stirling number of the first kind, (x)_n = sum_k s(n, k) x^k."""
    if n < 0 or k < 0:
        raise ValueError("n and k must be nonnegative")
    if k > n:
        return 0
    return _stirling1_row(n)[k]


def predicted_moment(n: int, q: int) -> Fraction:
    """Limit of E[#C(F_q)^n]: sum_i {n i} lambda^i."""
    if n < 1:
        raise ValueError("n must be positive")
    lam = lambda_of_q(q)
    return sum((stirling2(n, i) * lam**i for i in range(1, n + 1)), Fraction(0))


def predicted_falling_moment(n: int, q: int) -> Fraction:
    """Limit of E[(#C(F_q))_n], which is lambda^n."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return lambda_of_q(q) ** n


def falling_from_raw(raw: Sequence[Rational]) -> list[Fraction]:
    """Convert raw moments [m_1, ..., m_N] to falling moments (same length)."""
    m = [Fraction(1)] + [Fraction(x) for x in raw]
    return [
        sum((stirling1(n, k) * m[k] for k in range(n + 1)), Fraction(0))
        for n in range(1, len(m))
    ]


def raw_from_falling(falling: Sequence[Rational]) -> list[Fraction]:
    """Inverse of :func:`falling_from_raw`."""
    f = [Fraction(x) for x in falling]
    return [
        sum((stirling2(n, k) * f[k - 1] for k in range(1, n + 1)), Fraction(0))
        for n in range(1, len(f) + 1)
    ]


def hs_ratio_closed_form(n: int, q: int) -> Fraction:
    """q^n HS_{R_n}(q^{-1/2}) / HS_{R_0}(q^{-1/2}) = q^n (1 - 1/q)^{-n}.

    The untruncated ratio telescopes because HS_{R_n} = HS_{R_0} / (1-z^2)^n.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if q < 2:
        raise ValueError("q must be at least 2")
    value = Fraction(q) ** n / (1 - Fraction(1, q)) ** n
    assert value == lambda_of_q(q) ** n
    return value


def truncated_hs_ratio(n: int, q: int, D: int) -> Fraction:
    """Ratio of partial sums q^n sum_{j<=D} q^{-j} dim R_n^{2j} / sum_{j<=D} q^{-j} p(j)."""
    x = Fraction(1, q)
    num = _partial_sum(graded_dimensions(n, D), x)
    den = _partial_sum(graded_dimensions(0, D), x)
    return Fraction(q) ** n * num / den


def _partial_sum(coeffs: Iterable[int], x: Fraction) -> Fraction:
    # Horner in exact integers: sum c_j x^j with x = 1/q
    coeffs = list(coeffs)
    q = x.denominator
    acc = 0
    for c in coeffs:
        acc = acc * q + c
    return Fraction(acc, q ** (len(coeffs) - 1))


# ---------------------------------------------------------------------------
# certified reals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Ball:
    """A real number known to lie in [center - radius, center + radius]."""

    center: Fraction
    radius: Fraction = Fraction(0)

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("radius must be nonnegative")

    def __add__(self, other):
        other = _as_ball(other)
        return Ball(self.center + other.center, self.radius + other.radius)

    __radd__ = __add__

    def __mul__(self, other):
        other = _as_ball(other)
        return Ball(
            self.center * other.center,
            abs(self.center) * other.radius
            + abs(other.center) * self.radius
            + self.radius * other.radius,
        )

    __rmul__ = __mul__

    def reciprocal(self) -> "Ball":
        c, r = self.center, self.radius
        if abs(c) <= r:
            raise ZeroDivisionError("ball contains zero")
        return Ball(1 / c, r / (abs(c) * (abs(c) - r)))

    def rounded(self, bits: int) -> "Ball":
        """Round the centre to a multiple of 2^-bits, absorbing the error."""
        scale = 1 << bits
        c = Fraction(round(self.center * scale), scale)
        return Ball(c, self.radius + abs(c - self.center))

    def contains(self, x: Rational) -> bool:
        return abs(Fraction(x) - self.center) <= self.radius

    def __float__(self):
        return float(self.center)

    def to_decimal(self, digits: int) -> str:
        """Centre rendered with ``digits`` significant decimal digits."""
        import decimal

        ctx = decimal.Context(prec=digits)
        return str(
            ctx.divide(decimal.Decimal(self.center.numerator), decimal.Decimal(self.center.denominator))
        )


def _as_ball(x) -> Ball:
    if isinstance(x, Ball):
        return x
    return Ball(Fraction(x))


def _digits_to_bits(digits: int) -> int:
    return math.ceil(digits * math.log2(10))


def exp_ball(x: Rational, digits: int = 50) -> Ball:
    """Certified enclosure of e^x for rational x, radius below 10^-digits relative.

    Argument reduction x = 2^k r with |r| <= 1/2, Taylor series for e^r with
    an explicit remainder bound, then k squarings with rounding tracked.
    """
    if digits <= 0:
        raise ValueError("precision must be positive")
    x = Fraction(x)
    if x < 0:
        return exp_ball(-x, digits).reciprocal()
    k = 0
    r = x
    while r > Fraction(1, 2):
        r /= 2
        k += 1
    # guard bits cover the 2^k growth of relative error under squaring,
    # and the magnitude of e^x itself
    bits = _digits_to_bits(digits) + k + 16 + int(x) * 2
    target = Fraction(1, 1 << (bits + 4))
    total = Fraction(0)
    term = Fraction(1)
    i = 0
    while True:
        total += term
        i += 1
        term = term * r / i
        # remainder sum_{m>=i} r^m/m! <= term / (1 - r/(i+1)) <= 2 term
        if 2 * term < target:
            break
    ball = Ball(total, 2 * term).rounded(bits)
    for _ in range(k):
        ball = (ball * ball).rounded(bits)
    return ball


def poisson_pmf(n: int, lam: Rational, precision: int = 50) -> Ball:
    """lambda^n e^{-lambda} / n! with a certified error radius."""
    if precision <= 0:
        raise ValueError("precision must be positive")
    if n < 0:
        raise ValueError("n must be nonnegative")
    lam = Fraction(lam)
    if lam <= 0:
        raise ValueError("lambda must be positive")
    return Fraction(lam**n, math.factorial(n)) * exp_ball(-lam, precision)


def poisson_pmf_table(lam: Rational, n_max: int, precision: int = 30) -> list[Ball]:
    """PMF values for n = 0..n_max sharing one evaluation of e^{-lambda}."""
    lam = Fraction(lam)
    if lam <= 0:
        raise ValueError("lambda must be positive")
    e = exp_ball(-lam, precision)
    out = []
    weight = Fraction(1)
    for n in range(n_max + 1):
        if n:
            weight = weight * lam / n
        out.append(weight * e)
    return out


def poisson_moment_by_summation(
    n: int, lam: Rational, precision: int = 50, falling: bool = False
) -> Ball:
    """E[X^n] (or E[(X)_n]) for X ~ Poisson(lambda) by summing the PMF.

    The sum over k <= K is exact up to the e^{-lambda} enclosure; the tail
    k > K is bounded by a geometric series on the term ratio.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    lam = Fraction(lam)
    if lam <= 0:
        raise ValueError("lambda must be positive")
    eps = Fraction(1, 10 ** (precision + 5))

    def weight(k: int) -> int:
        if falling:
            return math.perm(k, n)
        return k**n

    K = max(2 * n, 4 * math.ceil(lam), 8)
    while True:
        # term ratio for k >= K+1 is at most (1 + 1/(K+1))^n * lam/(K+2)
        rho = Fraction(K + 2, K + 1) ** n * lam / (K + 2)
        if rho < Fraction(1, 2):
            first = Fraction((K + 1) ** n) * lam ** (K + 1) / math.factorial(K + 1)
            tail = first / (1 - rho)
            if tail < eps:
                break
        K *= 2
    s = Fraction(0)
    w = Fraction(1)
    for k in range(K + 1):
        if k:
            w = w * lam / k
        s += weight(k) * w
    core = s * exp_ball(-lam, precision + 5)
    return Ball(core.center, core.radius + tail)


# ---------------------------------------------------------------------------
# moment vectors
# ---------------------------------------------------------------------------


@dataclass
class MomentVector:
    """Moments indexed 1..n_max, either exact rationals or approximate reals."""

    entries: dict[int, Union[Fraction, float]] = field(default_factory=dict)
    exact: bool = True

    def __post_init__(self):
        keys = sorted(self.entries)
        if keys != list(range(1, len(keys) + 1)):
            raise ValueError("moment orders must be contiguous from 1")

    @property
    def n_max(self) -> int:
        return len(self.entries)

    def __getitem__(self, n: int):
        if n == 0:
            return Fraction(1) if self.exact else 1.0
        return self.entries[n]

    def as_list(self) -> list:
        return [self.entries[k] for k in range(1, self.n_max + 1)]
