"""Pointwise pieces of the top-cell splitting of ``L(K^k, K^(k+m))``.

``Hom(K^k, K^(k+m))`` splits as ``Y (+) X (+) Z`` (bottom block, skew part
and self-adjoint part of the top block).  Two collapse maps are modelled:
``collapse_t`` along ``(A, Z) -> A exp(-Z)`` and ``collapse_cflat`` along the
Cayley embedding.  Their composite is the collapse along
``F(Y, X, Z) = cayley(Y, X) exp(-Z)``, whose derivative at the origin is the
identity in the coordinates fixed by :func:`hom_coordinates`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import Field
from .matk import (
    DEFAULT_TOL,
    DimensionError,
    KMatrix,
    ToleranceConfig,
    rank,
    skew_self_split,
    vstack,
    zeros,
)
from .spectral import PolarFactorization, exp_selfadjoint, polar_factor
from .stiefel import CayleyCoords, StiefelPoint, cayley, cayley_inv, filtration_level

__all__ = [
    "HomDecomposition",
    "Basepoint",
    "BASEPOINT",
    "hom_decompose",
    "hom_assemble",
    "collapse_t",
    "collapse_cflat",
    "composite_F",
    "skew_basis",
    "selfadjoint_basis",
    "hom_coordinates",
    "hom_from_coordinates",
    "jacobian_at_origin",
    "jacobian_origin_check",
]


class Basepoint:
    """The point at infinity that a collapse map sends the complement of its open set to."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "BASEPOINT"

    def to_json(self) -> dict:
        return {"basepoint": True}


BASEPOINT = Basepoint()


@dataclass(frozen=True)
class HomDecomposition:
    Y: KMatrix
    X: KMatrix
    Z: KMatrix

    @property
    def k(self) -> int:
        return self.X.rows

    @property
    def m(self) -> int:
        return self.Y.rows

    def to_json(self) -> dict:
        return {"Y": self.Y.to_json(), "X": self.X.to_json(), "Z": self.Z.to_json()}

    @classmethod
    def from_json(cls, obj) -> "HomDecomposition":
        return cls(KMatrix.from_json(obj["Y"]), KMatrix.from_json(obj["X"]), KMatrix.from_json(obj["Z"]))


def hom_decompose(M: KMatrix) -> HomDecomposition:
    k = M.cols
    if M.rows < k:
        raise DimensionError("expected a (k+m) x k matrix")
    X, Z = skew_self_split(M.block(slice(0, k)))
    return HomDecomposition(M.block(slice(k, None)), X, Z)


def hom_assemble(d: HomDecomposition) -> KMatrix:
    return vstack(d.X + d.Z, d.Y)


def collapse_t(d: HomDecomposition, tol: ToleranceConfig = DEFAULT_TOL) -> PolarFactorization | Basepoint:
    M = hom_assemble(d)
    if rank(M, tol) < d.k:
        return BASEPOINT
    return polar_factor(M, tol)


def collapse_cflat(p: StiefelPoint, tol: ToleranceConfig = DEFAULT_TOL) -> CayleyCoords | Basepoint:
    if p.n and filtration_level(p, tol) < p.n:
        return BASEPOINT
    return cayley_inv(p, tol)


def composite_F(Y: KMatrix, X: KMatrix, Z: KMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> KMatrix:
    """``F(Y, X, Z) = cayley(Y, X) exp(-Z)`` as a ``(k+m) x k`` matrix."""
    return cayley(CayleyCoords(Y, X), tol).f @ exp_selfadjoint(-Z, tol)


# -- real coordinates -----------------------------------------------------------


def _hermitian_basis(field, k: int, sign: float) -> list[KMatrix]:
    # sign=-1: skew-adjoint (diagonal imaginary only); sign=+1: self-adjoint (diagonal real only)
    field = Field.parse(field)
    d = field.dim
    out = []
    for p in range(k):
        for q in range(p + 1, k):
            for c in range(d):
                a = np.zeros((k, k, d))
                a[p, q, c] = 1.0
                a[q, p, c] = sign * (1.0 if c == 0 else -1.0)
                out.append(KMatrix(field, a))
        for c in (range(1, d) if sign < 0 else range(1)):
            a = np.zeros((k, k, d))
            a[p, p, c] = 1.0
            out.append(KMatrix(field, a))
    return out


def skew_basis(field, k: int) -> list[KMatrix]:
    """A real basis of the skew-adjoint ``k x k`` matrices, in coordinate order."""
    return _hermitian_basis(field, k, -1.0)


def selfadjoint_basis(field, k: int) -> list[KMatrix]:
    """A real basis of the self-adjoint ``k x k`` matrices, in coordinate order."""
    return _hermitian_basis(field, k, +1.0)


def _free_coeffs(A: np.ndarray, sign: float) -> list[float]:
    k, d = A.shape[0], A.shape[-1]
    out = []
    for p in range(k):
        for q in range(p + 1, k):
            out.extend(A[p, q, :])
        if sign < 0:
            out.extend(A[p, p, 1:])
        else:
            out.append(A[p, p, 0])
    return out


def hom_coordinates(M: KMatrix) -> np.ndarray:
    """Real coordinates of a ``(k+m) x k`` matrix, ordered (Y-block, X-block, Z-block)."""
    dec = hom_decompose(M)
    return np.array(
        list(dec.Y.data.reshape(-1)) + _free_coeffs(dec.X.data, -1.0) + _free_coeffs(dec.Z.data, +1.0)
    )


def hom_from_coordinates(field, k: int, m: int, v: np.ndarray) -> HomDecomposition:
    field = Field.parse(field)
    d = field.dim
    ny = m * k * d
    skew = skew_basis(field, k)
    selfadj = selfadjoint_basis(field, k)
    if v.shape != (ny + len(skew) + len(selfadj),):
        raise DimensionError("coordinate vector has the wrong length")
    Y = KMatrix(field, v[:ny].reshape(m, k, d))
    X, Z = zeros(k, k, field), zeros(k, k, field)
    for c, B in zip(v[ny:ny + len(skew)], skew):
        X = X + c * B
    for c, B in zip(v[ny + len(skew):], selfadj):
        Z = Z + c * B
    return HomDecomposition(Y, X, Z)


def jacobian_at_origin(field, k: int, m: int, h: float = 1e-4) -> np.ndarray:
    """Central-difference Jacobian of ``F - F(0)`` in the coordinates of :func:`hom_coordinates`."""
    if h <= 0:
        raise ValueError("step must be positive")
    field = Field.parse(field)
    dim = field.dim * (k * k + k * m)
    J = np.zeros((dim, dim))
    for col in range(dim):
        e = np.zeros(dim)
        e[col] = h
        plus = hom_from_coordinates(field, k, m, e)
        minus = hom_from_coordinates(field, k, m, -e)
        fp = composite_F(plus.Y, plus.X, plus.Z)
        fm = composite_F(minus.Y, minus.X, minus.Z)
        J[:, col] = (hom_coordinates(fp) - hom_coordinates(fm)) / (2 * h)
    return J


def jacobian_origin_check(field, k: int, m: int, h: float = 1e-4) -> float:
    """``max |J - I|`` for the derivative of ``F`` at the origin."""
    J = jacobian_at_origin(field, k, m, h)
    return float(np.max(np.abs(J - np.eye(J.shape[0])))) if J.size else 0.0
