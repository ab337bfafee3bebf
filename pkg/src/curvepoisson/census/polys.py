"""Univariate polynomials over a FiniteField as coefficient tuples (lowest first).

The zero polynomial is ``()``; every other polynomial has a nonzero last
coefficient.  Degree of zero is -1.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .fields import FiniteField

Poly = tuple[int, ...]


def trim(a: Sequence[int]) -> Poly:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return tuple(int(x) for x in a)


def degree(a: Sequence[int]) -> int:
    return len(trim(a)) - 1


def add(F: FiniteField, a: Sequence[int], b: Sequence[int]) -> Poly:
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return trim(F.add(x, y) for x, y in zip(a, b))


def neg(F: FiniteField, a: Sequence[int]) -> Poly:
    return trim(F.neg(x) for x in a)


def sub(F: FiniteField, a: Sequence[int], b: Sequence[int]) -> Poly:
    return add(F, a, neg(F, b))


def scale(F: FiniteField, c: int, a: Sequence[int]) -> Poly:
    return trim(F.mul(c, x) for x in a)


def mul(F: FiniteField, a: Sequence[int], b: Sequence[int]) -> Poly:
    a, b = trim(a), trim(b)
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            if y:
                out[i + j] = F.add(out[i + j], F.mul(x, y))
    return trim(out)


def power(F: FiniteField, a: Sequence[int], n: int) -> Poly:
    out: Poly = (1,)
    for _ in range(n):
        out = mul(F, out, a)
    return out


def derivative(F: FiniteField, a: Sequence[int]) -> Poly:
    return trim(F.mul(F.from_int(i), x) for i, x in enumerate(a) if i > 0)


def divmod_(F: FiniteField, a: Sequence[int], b: Sequence[int]) -> tuple[Poly, Poly]:
    b = trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(trim(a))
    inv_lead = F.inv(b[-1])
    db = len(b) - 1
    if len(r) - 1 < db:
        return (), tuple(r)
    quot = [0] * (len(r) - db)
    for shift in range(len(r) - 1 - db, -1, -1):
        c = F.mul(r[shift + db], inv_lead)
        quot[shift] = c
        if c:
            for i, y in enumerate(b):
                r[shift + i] = F.sub(r[shift + i], F.mul(c, y))
    return trim(quot), trim(r)


def monic(F: FiniteField, a: Sequence[int]) -> Poly:
    a = trim(a)
    if not a:
        return ()
    return scale(F, F.inv(a[-1]), a)


def gcd(F: FiniteField, a: Sequence[int], b: Sequence[int]) -> Poly:
    """Monic gcd; gcd(0, 0) = 0."""
    a, b = trim(a), trim(b)
    while b:
        a, b = b, divmod_(F, a, b)[1]
    return monic(F, a)


def evaluate(F: FiniteField, a: Sequence[int], x: int) -> int:
    acc = 0
    for c in reversed(a):
        acc = F.add(F.mul(acc, x), c)
    return acc


def vevaluate(F: FiniteField, coeffs: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Evaluate a batch of polynomials at a batch of points.

    ``coeffs`` has shape (n_polys, n_coeffs) (lowest first) and ``X`` shape
    (n_points,); both already in field ``F``.  Returns (n_polys, n_points).
    """
    coeffs = np.asarray(coeffs, dtype=np.int64)
    X = np.asarray(X, dtype=np.int64)[None, :]
    acc = np.zeros((coeffs.shape[0], X.shape[1]), dtype=np.int64)
    for i in range(coeffs.shape[1] - 1, -1, -1):
        acc = F.vadd(F.vmul(acc, X), coeffs[:, i : i + 1])
    return acc


def homogenized_substitution(
    F: FiniteField, a: Sequence[int], n: int, M: tuple[int, int, int, int]
) -> Poly:
    """(cx+d)^n a((ax+b)/(cx+d)) for a polynomial of degree <= n, M = (a, b, c, d)."""
    ma, mb, mc, md = M
    lin1 = trim((mb, ma))
    lin2 = trim((md, mc))
    out: Poly = ()
    for i, coef in enumerate(a):
        if coef:
            term = mul(F, power(F, lin1, i), power(F, lin2, n - i))
            out = add(F, out, scale(F, coef, term))
    return out
