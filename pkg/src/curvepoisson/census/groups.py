"""Transformation groups of the normal forms and orbit-stabilizer validation.

Genus 1: (u, r, s, t) with x = u^2 X + r, y = u^3 Y + s u^2 X + t.

Genus 2: x = (aX + b)/(cX + d), y = (eY + j(X))/(cX + d)^3 with deg j <= 3,
so that h' = (H + 2j)/e and f' = (F - jH - j^2)/e^2, where
H = (cX+d)^3 h(x) and F = (cX+d)^6 f(x).  In odd characteristic only j = 0
keeps h = 0.  Parameters (a, b, c, d, e, j) and (la, lb, lc, ld, l^3 e, l^3 j)
give the same substitution, so the group is the parameter set modulo that
scalar subgroup.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import polys
from .curves import KINDS, _free_positions, candidate_block, smooth_mask
from .fields import FiniteField

__all__ = [
    "GroupSpec",
    "OrbitValidation",
    "group_elements",
    "group_order",
    "transform_rows",
    "validate_orbits",
]


@dataclass(frozen=True)
class GroupSpec:
    kind: str
    q: int
    order: int
    formula: str

    def __post_init__(self):
        if self.order <= 0:
            raise ValueError("group order must be positive")


def group_order(kind: str, F: FiniteField) -> GroupSpec:
    q = F.q
    if kind == "genus1":
        return GroupSpec(kind, q, q**3 * (q - 1), "q^3 (q - 1)")
    if kind == "genus2":
        base = (q * q - 1) * (q * q - q)
        if F.p == 2:
            return GroupSpec(kind, q, base * q**4, "(q^2 - 1)(q^2 - q) q^4")
        return GroupSpec(kind, q, base, "(q^2 - 1)(q^2 - q)")
    raise ValueError(f"unsupported kind {kind!r}")


# ---------------------------------------------------------------------------
# group elements and their action on coefficient rows
# ---------------------------------------------------------------------------


def group_elements(kind: str, F: FiniteField) -> list[tuple]:
    """Every parameter tuple of the (unreduced) transformation group."""
    E = range(F.q)
    units = range(1, F.q)
    if kind == "genus1":
        return [(u, r, s, t) for u in units for r in E for s in E for t in E]
    if kind == "genus2":
        mats = [
            (a, b, c, d)
            for a, b, c, d in itertools.product(E, repeat=4)
            if F.sub(F.mul(a, d), F.mul(b, c)) != 0
        ]
        js = list(itertools.product(E, repeat=4)) if F.p == 2 else [(0, 0, 0, 0)]
        return [m + (e, j) for m in mats for e in units for j in js]
    raise ValueError(f"unsupported kind {kind!r}")


def _substitution_matrix(F: FiniteField, n: int, M: tuple[int, int, int, int]) -> list[list[int]]:
    """Matrix of a -> (cx+d)^n a((ax+b)/(cx+d)) on polynomials of degree <= n."""
    cols = []
    for i in range(n + 1):
        image = polys.homogenized_substitution(F, [0] * i + [1], n, M)
        cols.append(list(image) + [0] * (n + 1 - len(image)))
    return [[cols[i][k] for i in range(n + 1)] for k in range(n + 1)]


def _apply_matrix(F: FiniteField, mat: list[list[int]], X: np.ndarray) -> np.ndarray:
    out = np.zeros((X.shape[0], len(mat)), dtype=np.int64)
    for k, row in enumerate(mat):
        acc = np.zeros(X.shape[0], dtype=np.int64)
        for i, c in enumerate(row):
            if c:
                acc = F.vadd(acc, F.vmul(c, X[:, i]))
        out[:, k] = acc
    return out


def _transform_genus1(F: FiniteField, element: tuple, rows: np.ndarray) -> np.ndarray:
    u, r, s, t = element
    M, A, S = F.vmul, F.vadd, F.vsub
    a1, a2, a3, a4, a6 = (rows[:, i] for i in range(5))
    c = F.from_int
    ui = F.inv(u)

    def scaled(x, power):
        return M(F.pow(ui, power), x)

    n1 = A(a1, M(c(2), s))
    n2 = S(A(S(a2, M(s, a1)), M(c(3), r)), M(s, s))
    n3 = A(A(a3, M(r, a1)), M(c(2), t))
    n4 = S(
        A(S(a4, M(s, a3)), A(M(M(c(2), r), a2), M(c(3), M(r, r)))),
        A(M(A(t, M(r, s)), a1), M(M(c(2), s), t)),
    )
    n6 = S(
        A(A(a6, M(r, a4)), A(M(M(r, r), a2), M(r, M(r, r)))),
        A(A(M(t, a3), M(t, t)), M(M(r, t), a1)),
    )
    cols = [scaled(n1, 1), scaled(n2, 2), scaled(n3, 3), scaled(n4, 4), scaled(n6, 6)]
    return np.stack([np.broadcast_to(x, rows.shape[:1]) for x in cols], axis=1)


def _transform_genus2(F: FiniteField, element: tuple, rows: np.ndarray) -> np.ndarray:
    a, b, c, d, e, j = element
    mat = (a, b, c, d)
    H = _apply_matrix(F, _substitution_matrix(F, 3, mat), rows[:, :4])
    Fv = _apply_matrix(F, _substitution_matrix(F, 6, mat), rows[:, 4:])
    ei = F.inv(e)
    two_j = [F.mul(F.from_int(2), x) for x in j]
    h_new = F.vmul(ei, F.vadd(H, np.array(two_j, dtype=np.int64)[None, :]))
    # multiplication by j as a 7x4 matrix, applied to H
    jmat = [[j[k - i] if 0 <= k - i < 4 else 0 for i in range(4)] for k in range(7)]
    jH = _apply_matrix(F, jmat, H)
    jj = list(polys.mul(F, j, j))
    jj = np.array(jj + [0] * (7 - len(jj)), dtype=np.int64)[None, :]
    f_new = F.vmul(F.mul(ei, ei), F.vsub(F.vsub(Fv, jH), jj))
    return np.concatenate([h_new, f_new], axis=1)


def transform_rows(kind: str, F: FiniteField, element: tuple, rows: np.ndarray) -> np.ndarray:
    """Coefficient rows of the transformed equations."""
    rows = np.asarray(rows, dtype=np.int64)
    if kind == "genus1":
        return _transform_genus1(F, element, rows)
    if kind == "genus2":
        return _transform_genus2(F, element, rows)
    raise ValueError(f"unsupported kind {kind!r}")


def _row_index(kind: str, F: FiniteField, rows: np.ndarray) -> np.ndarray:
    free = _free_positions(kind, F)
    idx = np.zeros(rows.shape[0], dtype=np.int64)
    for i, pos in enumerate(free):
        idx += rows[:, pos] * F.q**i
    return idx


# ---------------------------------------------------------------------------
# the identification subgroup, found by testing substitutions pointwise
# ---------------------------------------------------------------------------


def _acts_as_identity(kind: str, F: FiniteField, element: tuple) -> bool:
    """Whether the coordinate substitution is the identity map.

    Evaluated at every (X, Y) over GF(q^2) away from poles, which is more
    points than the degrees involved can vanish on.
    """
    E = F.extension(2)
    emb = E.embedding_from(F)
    xs = E.elements()
    ys = E.elements()
    if kind == "genus1":
        u, r, s, t = (int(emb[v]) for v in element)
        u2 = E.mul(u, u)
        x_new = E.vadd(E.vmul(u2, xs), r)
        same_x = np.all(x_new == xs)
        y_new = E.vadd(
            E.vadd(E.vmul(E.mul(u2, u), ys[:, None]), E.vmul(E.mul(s, u2), xs[None, :])), t
        )
        return bool(same_x and np.all(y_new == ys[:, None]))
    a, b, c, d, e = (int(emb[v]) for v in element[:5])
    j = np.array([int(emb[v]) for v in element[5]], dtype=np.int64)
    den = E.vadd(E.vmul(c, xs), d)
    ok = den != 0
    xs, den = xs[ok], den[ok]
    num = E.vadd(E.vmul(a, xs), b)
    if not np.all(E.vmul(num, E.vinv(den)) == xs):
        return False
    jx = polys.vevaluate(E, j[None, :], xs)[0]
    y_num = E.vadd(E.vmul(e, ys[:, None]), jx[None, :])
    y_new = E.vmul(y_num, E.vinv(E.vpow(den, 3))[None, :])
    return bool(np.all(y_new == ys[:, None]))


@dataclass
class OrbitValidation:
    kind: str
    q: int
    parameter_count: int
    identification_size: int
    group_order: int
    expected_order: int
    candidates: int
    smooth: int
    orbits: int
    smooth_orbits: int
    orbit_sum: int
    stabilizer_sizes: dict[int, int]
    closed: bool
    orbit_sizes_consistent: bool

    @property
    def ok(self) -> bool:
        return (
            self.closed
            and self.orbit_sizes_consistent
            and self.group_order == self.expected_order
            and self.orbit_sum == self.smooth
        )


def validate_orbits(kind: str, F: FiniteField) -> OrbitValidation:
    """Explicit orbit decomposition of the candidate space.

    Checks that the action preserves smoothness, that |G| = (#parameters) /
    (#identity substitutions) equals ``group_order``, and that summing
    |G|/#Stab_G over the smooth orbits recovers the number of smooth
    equations.  Stabilizers are counted directly, not derived from orbit
    sizes.
    """
    if kind not in KINDS:
        raise ValueError(f"unsupported kind {kind!r}")
    rows = candidate_block(kind, F)
    n = rows.shape[0]
    smooth = smooth_mask(kind, F, rows)
    elements = group_elements(kind, F)
    identity = [el for el in elements if _acts_as_identity(kind, F, el)]
    ident = len(identity)
    order = len(elements) // ident

    images = np.empty((len(elements), n), dtype=np.int64)
    for i, el in enumerate(elements):
        images[i] = _row_index(kind, F, transform_rows(kind, F, el, rows))
    closed = bool(np.all(smooth[images] == smooth[None, :]))

    src = np.broadcast_to(np.arange(n), images.shape).ravel()
    graph = coo_matrix((np.ones(src.size, dtype=np.int8), (src, images.ravel())), shape=(n, n))
    n_orbits, labels = connected_components(graph, directed=True, connection="weak")

    fixed = (images == np.arange(n)[None, :]).sum(axis=0)
    reps = np.unique(labels, return_index=True)[1]
    sizes = np.bincount(labels)
    # |orbit| * #Stab_H = |H| on every orbit, with both sides counted directly
    consistent = bool(np.all(sizes[labels] * fixed == len(elements)))
    orbit_sum = 0
    stabilizers: dict[int, int] = {}
    smooth_orbits = 0
    for r in reps:
        if not smooth[r]:
            continue
        smooth_orbits += 1
        stab = int(fixed[r]) // ident
        stabilizers[stab] = stabilizers.get(stab, 0) + 1
        orbit_sum += order // stab
    return OrbitValidation(
        kind=kind,
        q=F.q,
        parameter_count=len(elements),
        identification_size=ident,
        group_order=order,
        expected_order=group_order(kind, F).order,
        candidates=n,
        smooth=int(smooth.sum()),
        orbits=int(n_orbits),
        smooth_orbits=smooth_orbits,
        orbit_sum=orbit_sum,
        stabilizer_sizes=dict(sorted(stabilizers.items())),
        closed=closed,
        orbit_sizes_consistent=consistent,
    )
