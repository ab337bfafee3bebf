"""Haar-random eigenphases of the compact symplectic group USp(2g).

Two independent routes:

* ``"matrix"``: quaternionic Ginibre matrix, symplectic Gram-Schmidt with
  positive real normalisations (the quaternionic analogue of QR with the
  phase fix), then eigenvalues.
* ``"weyl"``: sample the eigenphase density
  prod_{i<j} (cos t_i - cos t_j)^2 prod_i sin^2 t_i on [0, pi]^g directly,
  by rejection for g <= 2 and by a Metropolis chain otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SymplecticSample",
    "haar_usp_matrices",
    "log_weyl_density",
    "phases_from_matrices",
    "sample_haar_usp",
    "sample_phases",
    "traces",
]

_SINGULAR_TOL = 1e-10
REJECTION_MAX_G = 2


@dataclass(frozen=True)
class SymplecticSample:
    """Eigenphases 0 <= t_1 <= ... <= t_g <= pi of one element of USp(2g)."""

    g: int
    phases: np.ndarray

    def __post_init__(self):
        phases = np.sort(np.asarray(self.phases, dtype=float))
        if phases.shape != (self.g,):
            raise ValueError(f"expected {self.g} phases, got shape {phases.shape}")
        if phases.size and (phases[0] < 0 or phases[-1] > np.pi):
            raise ValueError("phases must lie in [0, pi]")
        object.__setattr__(self, "phases", phases)

    def trace(self, k: int) -> float:
        """Tr(M^k) = 2 sum_j cos(k t_j)."""
        return float(2.0 * np.cos(k * self.phases).sum())

    def traces(self, m: int) -> np.ndarray:
        return traces(self.phases[None, :], m)[0]


def traces(phases: np.ndarray, m: int) -> np.ndarray:
    """Power-sum traces t_1..t_m for a batch of phase vectors, shape (batch, m)."""
    phases = np.asarray(phases, dtype=float)
    k = np.arange(1, m + 1, dtype=float)
    return 2.0 * np.cos(phases[:, None, :] * k[None, :, None]).sum(axis=-1)


# ---------------------------------------------------------------------------
# method A: matrix model
# ---------------------------------------------------------------------------


def _j_conj(v: np.ndarray) -> np.ndarray:
    # J conj(v) with J = [[0, -I], [I, 0]], acting on the second-to-last axis
    g = v.shape[-2] // 2
    top, bottom = v[..., :g, :], v[..., g:, :]
    return np.concatenate([-np.conj(bottom), np.conj(top)], axis=-2)


def _symplectic_gram_schmidt(Z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormalise the first g columns over the quaternions.

    Returns the unitary symplectic matrices and a boolean mask of draws whose
    Gram-Schmidt step hit a (numerically) vanishing column.
    """
    batch, two_g, _ = Z.shape
    g = two_g // 2
    U = np.zeros((batch, two_g, two_g), dtype=complex)
    singular = np.zeros(batch, dtype=bool)
    for k in range(g):
        v = Z[:, :, k].copy()
        for _ in range(2):  # second pass restores orthogonality lost to rounding
            for i in range(k):
                for col in (U[:, :, i], U[:, :, g + i]):
                    coef = np.einsum("bi,bi->b", np.conj(col), v)
                    v -= coef[:, None] * col
        norm = np.linalg.norm(v, axis=1)
        singular |= norm < _SINGULAR_TOL
        norm = np.where(norm < _SINGULAR_TOL, 1.0, norm)
        u = v / norm[:, None]
        U[:, :, k] = u
        U[:, :, g + k] = _j_conj(u[:, :, None])[:, :, 0]
    return U, singular


def haar_usp_matrices(g: int, size: int, rng: np.random.Generator) -> tuple[np.ndarray, int]:
    """``size`` Haar-distributed elements of USp(2g) and the number of redraws."""
    if g < 1:
        raise ValueError("g must be at least 1")
    out = np.empty((size, 2 * g, 2 * g), dtype=complex)
    todo = np.arange(size)
    retries = 0
    while todo.size:
        m = todo.size
        A = (rng.standard_normal((m, g, g)) + 1j * rng.standard_normal((m, g, g))) / np.sqrt(2)
        B = (rng.standard_normal((m, g, g)) + 1j * rng.standard_normal((m, g, g))) / np.sqrt(2)
        first = np.concatenate([A, B], axis=1)
        Z = np.concatenate([first, _j_conj(first)], axis=2)
        U, singular = _symplectic_gram_schmidt(Z)
        good = ~singular
        out[todo[good]] = U[good]
        retries += int(singular.sum())
        todo = todo[singular]
    return out, retries


def phases_from_matrices(U: np.ndarray) -> np.ndarray:
    """Sorted eigenphases in [0, pi], one per conjugate pair, shape (batch, g)."""
    g = U.shape[-1] // 2
    eig = np.linalg.eigvals(U)
    ang = np.sort(np.abs(np.angle(eig)), axis=-1)
    # each phase appears twice (e^{+it}, e^{-it}); average the pair
    pairs = ang.reshape(ang.shape[0], g, 2).mean(axis=-1)
    return np.clip(pairs, 0.0, np.pi)


# ---------------------------------------------------------------------------
# method B: Weyl density
# ---------------------------------------------------------------------------


def log_weyl_density(phases: np.ndarray) -> np.ndarray:
    """Unnormalised log density of USp(2g) eigenphases, batched over rows."""
    phases = np.atleast_2d(phases)
    c = np.cos(phases)
    with np.errstate(divide="ignore"):
        out = 2.0 * np.log(np.abs(np.sin(phases))).sum(axis=1)
        g = phases.shape[1]
        for i in range(g):
            for j in range(i + 1, g):
                out += 2.0 * np.log(np.abs(c[:, i] - c[:, j]))
    return out


def _weyl_rejection(g: int, size: int, rng: np.random.Generator) -> np.ndarray:
    # |cos a - cos b| <= 2 and sin^2 <= 1 bound the density by 4^{g(g-1)/2}
    log_bound = g * (g - 1) / 2 * np.log(4.0)
    out = np.empty((0, g))
    while out.shape[0] < size:
        need = size - out.shape[0]
        batch = max(64, int(need * (4.0 ** (g * (g - 1) / 2)) * 2.2 * 1.2))
        prop = rng.uniform(0.0, np.pi, size=(batch, g))
        u = rng.uniform(size=batch)
        keep = np.log(u) < log_weyl_density(prop) - log_bound
        out = np.concatenate([out, prop[keep]])
    return out[:size]


def _reflect(x: np.ndarray) -> np.ndarray:
    x = np.mod(x, 2 * np.pi)
    return np.where(x > np.pi, 2 * np.pi - x, x)


def _weyl_metropolis(
    g: int, size: int, rng: np.random.Generator, chains: int = 512
) -> np.ndarray:
    """Vectorised single-site Metropolis; burn-in 1000*g steps, thinning g steps.

    The step size is tuned toward 40% acceptance during burn-in only.
    """
    chains = max(1, min(chains, size))
    per_chain = -(-size // chains)
    state = rng.uniform(0.0, np.pi, size=(chains, g))
    logp = log_weyl_density(state)
    rows = np.arange(chains)
    step = 0.5
    window_acc = 0
    burn_in = 1000 * g

    def move() -> int:
        nonlocal logp
        idx = rng.integers(0, g, size=chains)
        prop = state.copy()
        prop[rows, idx] = _reflect(prop[rows, idx] + step * rng.standard_normal(chains))
        logp_new = log_weyl_density(prop)
        accept = np.log(rng.uniform(size=chains)) < logp_new - logp
        state[accept] = prop[accept]
        logp = np.where(accept, logp_new, logp)
        return int(accept.sum())

    for t in range(1, burn_in + 1):
        window_acc += move()
        if t % 100 == 0:
            rate = window_acc / (100 * chains)
            step = float(np.clip(step * np.exp(rate - 0.4), 1e-3, np.pi))
            window_acc = 0
    draws = np.empty((per_chain, chains, g))
    for s in range(per_chain):
        for _ in range(g):
            move()
        draws[s] = state
    return draws.reshape(-1, g)[:size]


def sample_phases(
    g: int, size: int, rng: np.random.Generator, method: str = "matrix"
) -> tuple[np.ndarray, int]:
    """Batch of sorted eigenphase vectors, shape (size, g), plus redraw count.

    ``method`` is ``"matrix"``, ``"weyl"`` (rejection for small g, Metropolis
    beyond), ``"rejection"`` or ``"metropolis"``.
    """
    if g < 1:
        raise ValueError("g must be at least 1")
    if size < 0:
        raise ValueError("size must be nonnegative")
    if method == "matrix":
        U, retries = haar_usp_matrices(g, size, rng)
        return phases_from_matrices(U), retries
    if method == "weyl":
        method = "rejection" if g <= REJECTION_MAX_G else "metropolis"
    if method == "rejection":
        return np.sort(_weyl_rejection(g, size, rng), axis=1), 0
    if method == "metropolis":
        return np.sort(_weyl_metropolis(g, size, rng), axis=1), 0
    raise ValueError(f"unknown sampling method {method!r}")


def sample_haar_usp(g: int, rng: np.random.Generator, method: str = "matrix") -> SymplecticSample:
    phases, _ = sample_phases(g, 1, rng, method)
    return SymplecticSample(g, phases[0])
