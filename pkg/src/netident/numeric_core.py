"""Dense complex linear-algebra primitives behind the identifiability tests."""

from __future__ import annotations

import numpy as np
from numpy.linalg import LinAlgError

from .network_model import Realization

__all__ = [
    "closed_loop",
    "kron",
    "numerical_rank",
    "determinant",
    "noise_floor",
    "DEFAULT_RANK_TOL",
    "RESIDUAL_SCALE",
]

DEFAULT_RANK_TOL = 1e-9
RESIDUAL_SCALE = 1e-10


def closed_loop(realization: Realization, *, residual_scale: float = RESIDUAL_SCALE) -> np.ndarray:
    """Closed-loop matrix ``T = (I - G)^{-1}`` of a realization.

    Guarantees ``||(I - G) T - I||_2 <= n * residual_scale``, applying up to
    two refinement steps; raises ``LinAlgError`` when ``I - G`` is singular
    or too ill-conditioned for that bound.
    """
    g = realization.matrix
    n = g.shape[0]
    eye = np.eye(n, dtype=complex)
    a = eye - g
    t = np.linalg.solve(a, eye)
    bound = n * residual_scale
    for _ in range(3):
        r = eye - a @ t
        res = np.linalg.norm(r, 2)
        if res <= bound:
            return t
        t = t + t @ r
    raise LinAlgError(
        f"closed-loop residual {res:.3e} exceeds bound {bound:.3e}; I - G is ill-conditioned"
    )


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two dense matrices."""
    a = np.atleast_2d(np.asarray(a))
    b = np.atleast_2d(np.asarray(b))
    return np.kron(a, b)


def numerical_rank(m: np.ndarray, rel_tol: float = DEFAULT_RANK_TOL, floor: float = 0.0) -> int:
    """Number of singular values above ``rel_tol`` times the largest one.

    The zero (or empty) matrix has rank 0.  ``floor`` is an optional
    absolute cutoff below which singular values are treated as exact zeros;
    matrices assembled from computed inverses carry rounding noise in their
    structural zeros, and without a floor an all-noise matrix would pass the
    relative test at full rank.  Raises ``LinAlgError`` on non-finite input.
    """
    m = np.asarray(m)
    if m.size == 0:
        return 0
    if not np.all(np.isfinite(m)):
        raise LinAlgError("cannot compute the rank of a matrix with non-finite entries")
    s = np.linalg.svd(m, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.count_nonzero(s > max(rel_tol * s[0], floor)))


def determinant(m: np.ndarray) -> complex:
    """Determinant via pivoted LU factorization.  Requires a square matrix."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"determinant requires a square matrix, got shape {m.shape}")
    return complex(np.linalg.det(m.astype(complex)))


def noise_floor(*factors: tuple[Realization, np.ndarray]) -> float:
    """Absolute scale below which singular values are rounding artifacts.

    ``factors`` are (realization, closed-loop matrix) pairs entering a
    product construction.  Structural zeros of a computed inverse carry
    noise of order ``eps * cond(I - G) * ||T||``, so matrices assembled
    from the factors inherit that noise times the other factors' scale;
    rank decisions must not count singular values at or below it.
    """
    n = factors[0][1].shape[0]
    eye = np.eye(n)
    scale = 1.0
    cond_sum = 0.0
    for r, t in factors:
        a_norm = float(np.linalg.norm(eye - r.matrix))
        t_norm = float(np.linalg.norm(t))
        scale *= t_norm
        cond_sum += a_norm * t_norm
    return 32.0 * n * float(np.finfo(float).eps) * cond_sum * scale
