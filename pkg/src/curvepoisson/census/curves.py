"""Normal-form curves of genus 1 and 2: enumeration, smoothness, point counts.

Both kinds are written as y^2 + h(x) y = f(x) with deg h <= g+1 and
deg f <= 2g+2, read in the weighted projective plane P(1, g+1, 1):

* ``genus1``: long Weierstrass y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6,
  coefficients (a1, a2, a3, a4, a6), the M_{1,1} locus with base point at
  infinity.
* ``genus2``: coefficients (h0..h3, f0..f6).  In odd characteristic only
  h = 0 is enumerated (y^2 = f(x)); in characteristic 2 all pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import polys
from .fields import FiniteField

__all__ = [
    "KINDS",
    "CurveEquation",
    "candidate_count",
    "candidate_block",
    "count_points",
    "enumerate_curves",
    "hyperelliptic_arrays",
    "is_smooth",
    "point_count",
    "singular_points_bruteforce",
    "smooth_mask",
]

KINDS = ("genus1", "genus2")
GENUS = {"genus1": 1, "genus2": 2}
MAX_CANDIDATES = 1 << 32
_COUNT_BLOCK = 1 << 20


@dataclass(frozen=True)
class CurveEquation:
    kind: str
    field: FiniteField
    coefficients: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unsupported kind {self.kind!r}")
        expected = 5 if self.kind == "genus1" else 11
        if len(self.coefficients) != expected:
            raise ValueError(f"{self.kind} needs {expected} coefficients")

    @property
    def genus(self) -> int:
        return GENUS[self.kind]

    @property
    def h(self) -> tuple[int, ...]:
        H, _ = hyperelliptic_arrays(self.kind, np.array([self.coefficients]))
        return tuple(int(x) for x in H[0])

    @property
    def f(self) -> tuple[int, ...]:
        _, Fc = hyperelliptic_arrays(self.kind, np.array([self.coefficients]))
        return tuple(int(x) for x in Fc[0])

    def is_smooth(self) -> bool:
        return is_smooth(self)

    def point_count(self, k: int = 1) -> int:
        return point_count(self, k)


# ---------------------------------------------------------------------------
# candidate spaces
# ---------------------------------------------------------------------------


def _free_positions(kind: str, F: FiniteField) -> list[int]:
    """Coefficient slots that vary during enumeration."""
    if kind == "genus1":
        return list(range(5))
    if kind == "genus2":
        return list(range(11)) if F.p == 2 else list(range(4, 11))
    raise ValueError(f"unsupported kind {kind!r}")


def candidate_count(kind: str, F: FiniteField) -> int:
    return F.q ** len(_free_positions(kind, F))


def candidate_block(kind: str, F: FiniteField, prefix: int | None = None) -> np.ndarray:
    """All candidate coefficient rows, or those whose last free slot equals ``prefix``.

    Rows are ordered by the base-q integer whose digit i is free slot i.
    """
    total = candidate_count(kind, F)
    if total > MAX_CANDIDATES:
        raise ValueError(f"{total} candidates exceed the exhaustive-enumeration guard")
    free = _free_positions(kind, F)
    m = len(free)
    q = F.q
    if prefix is None:
        idx = np.arange(total, dtype=np.int64)
    else:
        step = q ** (m - 1)
        idx = np.arange(prefix * step, (prefix + 1) * step, dtype=np.int64)
    width = 5 if kind == "genus1" else 11
    rows = np.zeros((idx.size, width), dtype=np.int64)
    for i, pos in enumerate(free):
        rows[:, pos] = (idx // q**i) % q
    return rows


def hyperelliptic_arrays(kind: str, rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(h, f) coefficient arrays, padded to lengths g+2 and 2g+3."""
    rows = np.asarray(rows, dtype=np.int64)
    n = rows.shape[0]
    if kind == "genus1":
        a1, a2, a3, a4, a6 = rows.T
        H = np.stack([a3, a1, np.zeros(n, np.int64)], axis=1)
        Fc = np.stack([a6, a4, a2, np.ones(n, np.int64), np.zeros(n, np.int64)], axis=1)
        return H, Fc
    if kind == "genus2":
        return rows[:, :4], rows[:, 4:]
    raise ValueError(f"unsupported kind {kind!r}")


# ---------------------------------------------------------------------------
# smoothness
# ---------------------------------------------------------------------------


def _weierstrass_discriminant(F: FiniteField, rows: np.ndarray) -> np.ndarray:
    a1, a2, a3, a4, a6 = (rows[:, i] for i in range(5))
    M, A, S = F.vmul, F.vadd, F.vsub

    def c(n):
        return F.from_int(n)

    b2 = A(M(a1, a1), M(c(4), a2))
    b4 = A(M(c(2), a4), M(a1, a3))
    b6 = A(M(a3, a3), M(c(4), a6))
    b8 = S(
        A(A(M(M(a1, a1), a6), M(c(4), M(a2, a6))), M(a2, M(a3, a3))),
        A(M(a1, M(a3, a4)), M(a4, a4)),
    )
    # Delta = -b2^2 b8 - 8 b4^3 - 27 b6^2 + 9 b2 b4 b6
    t1 = M(M(b2, b2), b8)
    t2 = M(c(8), M(b4, M(b4, b4)))
    t3 = M(c(27), M(b6, b6))
    t4 = M(c(9), M(b2, M(b4, b6)))
    return S(t4, A(A(t1, t2), t3))


def _genus2_smooth_odd(F: FiniteField, f: tuple[int, ...]) -> bool:
    f = polys.trim(f)
    if polys.degree(f) not in (5, 6):
        return False
    return polys.gcd(F, f, polys.derivative(F, f)) == (1,)


def _genus2_smooth_char2(F: FiniteField, h: tuple[int, ...], f: tuple[int, ...]) -> bool:
    h_full = tuple(h) + (0,) * (4 - len(h))
    f_full = tuple(f) + (0,) * (7 - len(f))
    h, f = polys.trim(h), polys.trim(f)
    if not h:
        return False
    if max(2 * polys.degree(h), polys.degree(f)) not in (5, 6):
        return False
    dh = polys.derivative(F, h)
    df = polys.derivative(F, f)
    crit = polys.add(F, polys.mul(F, df, df), polys.mul(F, polys.mul(F, dh, dh), f))
    if polys.gcd(F, h, crit) != (1,):
        return False
    # the same criterion at x = 0 on the reversed pair x^3 h(1/x), x^6 f(1/x)
    h3, h2 = h_full[3], h_full[2]
    f6, f5 = f_full[6], f_full[5]
    at_infinity = F.add(F.mul(f5, f5), F.mul(F.mul(h2, h2), f6))
    return not (h3 == 0 and at_infinity == 0)


def smooth_mask(kind: str, F: FiniteField, rows: np.ndarray) -> np.ndarray:
    """Smoothness (and correct genus) of each candidate row."""
    rows = np.asarray(rows, dtype=np.int64)
    if kind == "genus1":
        return _weierstrass_discriminant(F, rows) != 0
    if kind != "genus2":
        raise ValueError(f"unsupported kind {kind!r}")
    out = np.zeros(rows.shape[0], dtype=bool)
    if F.p == 2:
        for i, row in enumerate(rows.tolist()):
            out[i] = _genus2_smooth_char2(F, tuple(row[:4]), tuple(row[4:]))
    else:
        # deg f in {5, 6} is a cheap vectorised prefilter
        candidates = np.flatnonzero((rows[:, 10] != 0) | (rows[:, 9] != 0))
        for i in candidates:
            if rows[i, :4].any():
                continue
            out[i] = _genus2_smooth_odd(F, tuple(int(x) for x in rows[i, 4:]))
    return out


def is_smooth(curve: CurveEquation) -> bool:
    return bool(smooth_mask(curve.kind, curve.field, np.array([curve.coefficients]))[0])


def enumerate_curves(kind: str, F: FiniteField) -> Iterator[CurveEquation]:
    """Every smooth normal-form equation of the given kind over F, once each."""
    if kind not in KINDS:
        raise ValueError(f"unsupported kind {kind!r}")
    candidate_count(kind, F)  # guard
    for prefix in range(F.q):
        rows = candidate_block(kind, F, prefix)
        for row in rows[smooth_mask(kind, F, rows)]:
            yield CurveEquation(kind, F, tuple(int(x) for x in row))


# ---------------------------------------------------------------------------
# point counting
# ---------------------------------------------------------------------------


def _solutions(E: FiniteField, hv: np.ndarray, fv: np.ndarray) -> np.ndarray:
    """Number of y in E with y^2 + hv y = fv, elementwise."""
    if E.p == 2:
        nz = hv != 0
        safe_h = np.where(nz, hv, 1)
        z = E.vmul(fv, E.vinv(E.vmul(safe_h, safe_h)))
        two_or_zero = np.where(E.vtrace(z) == 0, 2, 0)
        return np.where(nz, two_or_zero, 1)
    disc = E.vadd(E.vmul(hv, hv), E.vmul(E.from_int(4), fv))
    return 1 + E.vquadratic_character(disc)


def count_points(kind: str, F: FiniteField, rows: np.ndarray, k: int = 1) -> np.ndarray:
    """#C(F_{q^k}) for each row: affine solutions plus points at infinity."""
    if not 1 <= k <= 4:
        raise ValueError("point counts are supported for 1 <= k <= 4")
    rows = np.asarray(rows, dtype=np.int64)
    E = F.extension(k)
    emb = E.embedding_from(F)
    H, Fc = hyperelliptic_arrays(kind, rows)
    H, Fc = emb[H], emb[Fc]
    X = E.elements()
    out = np.empty(rows.shape[0], dtype=np.int64)
    step = max(1, _COUNT_BLOCK // E.q)  # bounds the (rows, points) work arrays
    for lo in range(0, rows.shape[0], step):
        h, f = H[lo : lo + step], Fc[lo : lo + step]
        hv = polys.vevaluate(E, h, X)
        fv = polys.vevaluate(E, f, X)
        affine = _solutions(E, hv, fv).sum(axis=1)
        out[lo : lo + step] = affine + _solutions(E, h[:, -1], f[:, -1])
    return out


def point_count(curve: CurveEquation, k: int = 1) -> int:
    return int(count_points(curve.kind, curve.field, np.array([curve.coefficients]), k)[0])


# ---------------------------------------------------------------------------
# independent singularity search
# ---------------------------------------------------------------------------


def singular_points_bruteforce(curve: CurveEquation, E: FiniteField) -> list[tuple]:
    """Singular points of y^2 + h y - f over E, by exhaustive search.

    Checks every (x, y) in E^2 in the affine chart and every (0, y) in the
    chart at infinity (reversed pair), testing the curve equation and both
    partial derivatives directly.  Points at infinity are reported as
    ``("inf", y)``.
    """
    F = curve.field
    emb = E.embedding_from(F)
    h = [int(emb[c]) for c in curve.h]
    f = [int(emb[c]) for c in curve.f]
    X = E.elements()
    found = []
    charts = [("aff", h, f, X), ("inf", h[::-1], f[::-1], np.zeros(1, dtype=np.int64))]
    two = E.from_int(2)
    for label, hc, fc, xs in charts:
        hc = polys.trim(hc)
        fc = polys.trim(fc)
        dh = polys.derivative(E, hc)
        df = polys.derivative(E, fc)
        rows = [hc, fc, dh, df]
        width = max(len(r) for r in rows) or 1
        C = np.array([list(r) + [0] * (width - len(r)) for r in rows], dtype=np.int64)
        hv, fv, dhv, dfv = polys.vevaluate(E, C, xs)
        Y = E.elements()[:, None]
        # F = y^2 + h y - f ; F_x = h' y - f' ; F_y = 2 y + h
        Fv = E.vsub(E.vadd(E.vmul(Y, Y), E.vmul(hv[None, :], Y)), fv[None, :])
        Fx = E.vsub(E.vmul(dhv[None, :], Y), dfv[None, :])
        Fy = E.vadd(E.vmul(two, Y), hv[None, :])
        ys, xi = np.nonzero((Fv == 0) & (Fx == 0) & (Fy == 0))
        for y, i in zip(ys.tolist(), xi.tolist()):
            found.append((label, int(xs[i]), y) if label == "aff" else ("inf", y))
    return found
