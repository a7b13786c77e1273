"""Independent numerical routes used to cross-check the K-linear algebra.

Everything here goes through LAPACK via numpy on ordinary real or complex
matrices, never through the elimination or Jacobi code.
"""
from __future__ import annotations

import numpy as np

from .algebra import Field
from .matk import KMatrix

__all__ = ["real_form", "complex_form", "real_rank", "eigvals_oracle"]


def _left_mult_block(a: np.ndarray) -> np.ndarray:
    d = a.shape[-1]
    if d == 1:
        return a.reshape(1, 1)
    if d == 2:
        x, y = a
        return np.array([[x, -y], [y, x]])
    w, x, y, z = a
    return np.array([
        [w, -x, -y, -z],
        [x, w, -z, y],
        [y, z, w, -x],
        [z, -y, x, w],
    ])


def real_form(M: KMatrix) -> np.ndarray:
    """The ``(d*rows) x (d*cols)`` real matrix of ``v -> M v`` on ``u K^cols``."""
    d = M.field.dim
    out = np.zeros((d * M.rows, d * M.cols))
    for i in range(M.rows):
        for j in range(M.cols):
            out[i * d:(i + 1) * d, j * d:(j + 1) * d] = _left_mult_block(M.data[i, j])
    return out


def complex_form(M: KMatrix) -> np.ndarray:
    """Complex matrix of ``M``; over H the ``2n x 2n`` adjoint embedding ``[[A, B], [-conj B, conj A]]``.

    A quaternion entry ``a + b i + c j + d k`` is written ``A + B j`` with
    ``A = a + b i`` and ``B = c + d i``.
    """
    a = M.data
    if M.field is Field.R:
        return a[..., 0].astype(complex)
    A = a[..., 0] + 1j * a[..., 1]
    if M.field is Field.C:
        return A
    B = a[..., 2] + 1j * a[..., 3]
    return np.block([[A, B], [-B.conj(), A.conj()]])


def real_rank(M: KMatrix, rtol: float = 1e-8, scale: float | None = None) -> int:
    """K-rank of ``M`` from an SVD of its real form.

    Singular values above ``rtol * scale`` count; ``scale`` defaults to the largest one.
    """
    if M.data.size == 0:
        return 0
    R = real_form(M)
    s = np.linalg.svd(R, compute_uv=False)
    if scale is None:
        scale = s[0]
    if s[0] == 0.0 or scale == 0.0:
        return 0
    return int(np.sum(s > rtol * scale)) // M.field.dim


def eigvals_oracle(X: KMatrix) -> np.ndarray:
    """Eigenvalues of a self-adjoint matrix via LAPACK; over H each is listed once (multiplicity halved)."""
    ev = np.linalg.eigvalsh(complex_form(X))
    if X.field is Field.H:
        return ev[::2]
    return ev
