"""Dense small-dimension linear algebra: pseudoinverse solves, dual Hessian
norms, eigenvalue-based PSD tests, and principal-minor enumeration.

All spectral routines symmetrize their input (M <- (M + M^T)/2) after checking
that the asymmetry is below 1e-8 relative; larger drift indicates an upstream
bug and is rejected.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import CapabilityError, InputError

#: Relative asymmetry beyond which a matrix is rejected instead of symmetrized.
ASYMMETRY_RTOL = 1e-8

#: Default relative cutoff for pseudoinverse spectral truncation.
DEFAULT_PINV_RTOL = 1e-10

#: Hard cap for exhaustive principal-minor enumeration (2^d - 1 subsets).
MINOR_DIMENSION_CAP = 8


@dataclass(frozen=True)
class DualNormResult:
    """Dual Hessian norm squared <g, H^+ g> plus the range-condition flag."""

    value: float
    in_range: bool
    rank: int


def _as_square(M, name="matrix"):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InputError(f"{name} must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InputError(f"{name} has non-finite entries")
    return M


def symmetrize(M):
    """Return (M + M^T)/2, rejecting asymmetry above 1e-8 relative."""
    M = _as_square(M)
    scale = np.linalg.norm(M)
    if scale > 0 and np.linalg.norm(M - M.T) > ASYMMETRY_RTOL * scale:
        raise InputError("matrix asymmetry exceeds 1e-8 relative; refusing to symmetrize")
    return 0.5 * (M + M.T)


def _pinv_apply(H, g, rel_tol):
    """Eigendecomposition-based H^+ g with relative spectral cutoff.

    Returns (solution, rank, eigenvalues, eigenvectors).
    """
    w, V = np.linalg.eigh(H)
    wmax = np.max(np.abs(w)) if w.size else 0.0
    if wmax == 0.0:
        return np.zeros_like(g), 0, w, V
    keep = np.abs(w) >= rel_tol * wmax
    inv = np.zeros_like(w)
    inv[keep] = 1.0 / w[keep]
    p = V @ (inv * (V.T @ g))
    return p, int(np.count_nonzero(keep)), w, V


def _check_pinv_args(H, g, rel_tol):
    H = symmetrize(H)
    g = np.asarray(g, dtype=float)
    if g.shape != (H.shape[0],):
        raise InputError(f"gradient shape {g.shape} does not match matrix dimension {H.shape[0]}")
    if not np.all(np.isfinite(g)):
        raise InputError("vector has non-finite entries")
    if not (0.0 < rel_tol <= 1e-4):
        raise InputError(f"rel_tol must lie in (0, 1e-4], got {rel_tol}")
    return H, g


def pinv_solve(H, g, rel_tol=DEFAULT_PINV_RTOL):
    """Minimum-norm solution of min ||H p - g|| via spectral pseudoinverse.

    Eigenvalues with |lambda| < rel_tol * max|lambda| are treated as zero.
    """
    H, g = _check_pinv_args(H, g, rel_tol)
    p, _, _, _ = _pinv_apply(H, g, rel_tol)
    return p


def dual_norm_sq(H, g, rel_tol=DEFAULT_PINV_RTOL):
    """Compute ||g||*^2 = <g, H^+ g> and test whether g lies in Range(H).

    in_range is true iff ||H (H^+ g) - g|| <= rel_tol * ||g|| (vacuously true
    for g = 0). The value can be negative when H is indefinite.
    """
    H, g = _check_pinv_args(H, g, rel_tol)
    p, rank, _, _ = _pinv_apply(H, g, rel_tol)
    gnorm = np.linalg.norm(g)
    if gnorm == 0.0:
        return DualNormResult(0.0, True, rank)
    residual = np.linalg.norm(H @ p - g)
    return DualNormResult(float(g @ p), bool(residual <= rel_tol * gnorm), rank)


def min_eigenvalue(M):
    """Smallest eigenvalue of a symmetric matrix."""
    return float(np.linalg.eigvalsh(symmetrize(M))[0])


def spectral_norm(M):
    """Largest |eigenvalue| of a symmetric matrix."""
    w = np.linalg.eigvalsh(symmetrize(M))
    return float(np.max(np.abs(w))) if w.size else 0.0


def principal_minors(M):
    """All nonempty principal minors of M as (index tuple, determinant) pairs.

    Index tuples are 0-based, ordered by size then lexicographically.
    Exhaustive (2^d - 1 subsets); dimensions above 8 are rejected.
    """
    M = symmetrize(M)
    d = M.shape[0]
    if d > MINOR_DIMENSION_CAP:
        raise CapabilityError(f"principal minor enumeration capped at d = {MINOR_DIMENSION_CAP}, got {d}")
    out = []
    for k in range(1, d + 1):
        for idx in itertools.combinations(range(d), k):
            sub = M[np.ix_(idx, idx)]
            out.append((idx, float(np.linalg.det(sub))))
    return out
