"""Self-adjoint eigendecomposition over K, matrix exponential, and polar factors."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import kconj, kmul, knorm
from .matk import (
    DEFAULT_TOL,
    DimensionError,
    KMatrix,
    ToleranceConfig,
    adjoint,
    identity,
    max_norm,
    rank,
)

__all__ = [
    "SpectralDecomposition",
    "PolarFactorization",
    "NotSelfAdjointError",
    "NotPositiveDefiniteError",
    "ConvergenceError",
    "RankDeficientError",
    "eigh",
    "spectral_apply",
    "exp_matrix",
    "exp_selfadjoint",
    "log_posdef",
    "sqrt_posdef",
    "polar_factor",
]

MAX_SWEEPS = 60
OFF_TOL = 1e-12
TAYLOR_TERMS = 18


class NotSelfAdjointError(ValueError):
    pass


class NotPositiveDefiniteError(np.linalg.LinAlgError):
    pass


class ConvergenceError(np.linalg.LinAlgError):
    pass


class RankDeficientError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class SpectralDecomposition:
    Q: KMatrix
    lam: np.ndarray

    def reconstruct(self) -> KMatrix:
        return _scale_cols(self.Q, self.lam) @ adjoint(self.Q)


@dataclass(frozen=True)
class PolarFactorization:
    A: KMatrix
    Z: KMatrix


def _scale_cols(Q: KMatrix, w: np.ndarray) -> KMatrix:
    return KMatrix(Q.field, Q.data * np.asarray(w, dtype=float)[None, :, None])


def _canonicalize_columns(v: np.ndarray) -> np.ndarray:
    # right-multiply each column by a unit scalar so that its first
    # largest-norm entry becomes real positive
    out = np.array(v)
    norms = knorm(out)
    for j in range(out.shape[1]):
        col = norms[:, j]
        i = int(np.argmax(col >= col.max() * (1 - 1e-12)))
        a = out[i, j]
        u = kconj(a) / knorm(a)
        out[:, j] = kmul(out[:, j], u[None, :])
    return out


def eigh(X: KMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> SpectralDecomposition:
    """Diagonalize a self-adjoint matrix by cyclic Jacobi sweeps.

    Each off-diagonal entry is first made real by a diagonal unit-scalar
    similarity, after which a real plane rotation annihilates it; the same
    code therefore serves R, C and H.

    Returns
    -------
    SpectralDecomposition
        ``Q`` with orthonormal columns and ascending real eigenvalues ``lam``,
        ``X = Q diag(lam) Q*``.  Within a cluster of (near-)equal eigenvalues the
        columns are just some orthonormal basis of the eigenspace.
    """
    if X.rows != X.cols:
        raise DimensionError("eigh needs a square matrix")
    k = X.rows
    scale = max_norm(X)
    if max_norm(X - adjoint(X)) > tol.eps_iso * scale:
        raise NotSelfAdjointError("matrix is not self-adjoint")
    a = np.array(X.data)
    a = (a + kconj(a.transpose(1, 0, 2))) / 2
    a[np.arange(k), np.arange(k), 1:] = 0.0
    v = np.array(identity(k, X.field).data)
    fro = float(np.sqrt(np.sum(a * a)))
    target = OFF_TOL * fro

    offdiag = ~np.eye(k, dtype=bool)

    def off() -> float:
        return float(np.sqrt(np.sum(a[offdiag] ** 2)))

    sweeps = 0
    extra = 1  # one more sweep past the target; convergence is quadratic there
    while True:
        residual = off()
        if residual <= target:
            if residual == 0.0 or extra == 0:
                break
            extra -= 1
        if sweeps >= MAX_SWEEPS:
            raise ConvergenceError(f"Jacobi did not converge in {MAX_SWEEPS} sweeps")
        sweeps += 1
        for p in range(k - 1):
            for q in range(p + 1, k):
                apq = a[p, q]
                b = float(knorm(apq))
                if b == 0.0 or b <= 1e-300:
                    continue
                # phase: column q times u, row q times conj(u), with u = conj(apq)/|apq|
                u = kconj(apq) / b
                a[:, q] = kmul(a[:, q], u[None, :])
                a[q, :] = kmul(kconj(u)[None, :], a[q, :])
                v[:, q] = kmul(v[:, q], u[None, :])
                app, aqq = a[p, p, 0], a[q, q, 0]
                tau = (aqq - app) / (2.0 * b)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p, 1:] = 0.0
                a[q, q, 1:] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    lam = a[np.arange(k), np.arange(k), 0].copy()
    order = np.argsort(lam, kind="stable")
    lam = lam[order]
    v = _canonicalize_columns(v[:, order]) if k else v
    return SpectralDecomposition(KMatrix(X.field, v), lam)


def spectral_apply(X: KMatrix, fn: Callable[[np.ndarray], np.ndarray], tol: ToleranceConfig = DEFAULT_TOL) -> KMatrix:
    """``Q diag(fn(lam)) Q*`` for a self-adjoint ``X``."""
    dec = eigh(X, tol)
    return _scale_cols(dec.Q, fn(dec.lam)) @ adjoint(dec.Q)


def exp_matrix(M: KMatrix) -> KMatrix:
    """Matrix exponential by scaling and squaring with a truncated Taylor series."""
    if M.rows != M.cols:
        raise DimensionError("exp needs a square matrix")
    n = M.rows
    one_norm = float(knorm(M.data).sum(axis=0).max()) if n else 0.0
    s = 0
    if one_norm > 0.5:
        s = int(math.ceil(math.log2(one_norm / 0.5)))
    A = M / (2.0**s)
    eye = identity(n, M.field)
    # Horner: I + A/1 (I + A/2 (I + ... (I + A/N)))
    out = eye
    for j in range(TAYLOR_TERMS, 0, -1):
        out = eye + (A @ out) / j
    for _ in range(s):
        out = out @ out
    return out


def _check_posdef(lam: np.ndarray, tol: ToleranceConfig, rel: float | None = None) -> None:
    rel = tol.eps_rank if rel is None else rel
    if lam.size and (lam[0] <= 0 or lam[0] <= rel * lam[-1]):
        raise NotPositiveDefiniteError(f"smallest eigenvalue {lam[0]:.3g} is not safely positive")


def exp_selfadjoint(Z: KMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> KMatrix:
    return spectral_apply(Z, np.exp, tol)


def log_posdef(P: KMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> KMatrix:
    dec = eigh(P, tol)
    _check_posdef(dec.lam, tol)
    return _scale_cols(dec.Q, np.log(dec.lam)) @ adjoint(dec.Q)


def sqrt_posdef(P: KMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> KMatrix:
    dec = eigh(P, tol)
    _check_posdef(dec.lam, tol)
    return _scale_cols(dec.Q, np.sqrt(dec.lam)) @ adjoint(dec.Q)


def polar_factor(B: KMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> PolarFactorization:
    """Split an injective ``B`` as ``B = A exp(-Z)``.

    ``A = B (B*B)^(-1/2)`` is an isometric embedding and
    ``Z = -log(B*B) / 2`` is self-adjoint; one eigendecomposition of ``B*B``
    feeds both.
    """
    k = B.cols
    if rank(B, tol) < k:
        raise RankDeficientError("polar factorization needs an injective matrix")
    dec = eigh(adjoint(B) @ B, tol)
    try:
        # eigenvalues of B*B are squared singular values of B
        _check_posdef(dec.lam, tol, tol.eps_rank ** 2)
    except NotPositiveDefiniteError as exc:
        raise RankDeficientError(str(exc)) from None
    Qs = adjoint(dec.Q)
    A = B @ (_scale_cols(dec.Q, dec.lam ** -0.5) @ Qs)
    Z = _scale_cols(dec.Q, -0.5 * np.log(dec.lam)) @ Qs
    return PolarFactorization(A, Z)
