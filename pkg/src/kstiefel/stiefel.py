"""Stiefel manifolds ``L(K^n, K^(n+m))``: eigenspace filtration, Cayley coordinates, strata.

A point ``f`` is stored as its ``(n+m) x n`` matrix with top block ``f1`` and
bottom block ``f2``.  Its filtration level is the dimension of the orthogonal
complement of ``ker(f - i1)``, where ``i1`` includes ``K^n`` as the first
summand.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import Field, FieldMismatchError, GaloisElement, galois_apply_array, kmul
from .matk import (
    DEFAULT_TOL,
    DimensionError,
    KMatrix,
    ToleranceConfig,
    adjoint,
    gauss_inverse,
    identity,
    image_orthobasis,
    is_isometry,
    isometry_residual,
    rank,
    rank_profile,
    vstack,
    zeros,
)

__all__ = [
    "StiefelPoint",
    "CayleyCoords",
    "StratumCoords",
    "ZetaMap",
    "InLowerStratum",
    "AboveStratum",
    "LevelDeficientError",
    "AmbiguousRankError",
    "NotIsometricError",
    "inclusion",
    "filtration_level",
    "classify_level",
    "cayley",
    "cayley_inv",
    "conjugate_embedding",
    "galois_act",
    "zeta",
    "zeta_formula",
    "extension_galois",
    "stratum_decompose",
    "stratum_reconstruct",
    "stabilize",
]


class LevelDeficientError(ValueError):
    pass


class AmbiguousRankError(ValueError):
    pass


class NotIsometricError(ValueError):
    pass


@dataclass(frozen=True)
class StiefelPoint:
    """An isometric embedding ``f: K^n -> K^n + K^m``."""

    f: KMatrix
    n: int
    m: int

    def __post_init__(self):
        if self.f.shape != (self.n + self.m, self.n):
            raise DimensionError(f"f has shape {self.f.shape}, expected ({self.n + self.m}, {self.n})")

    @classmethod
    def of(cls, f: KMatrix, n: int | None = None) -> "StiefelPoint":
        n = f.cols if n is None else n
        return cls(f, n, f.rows - n)

    @property
    def field(self) -> Field:
        return self.f.field

    @property
    def f1(self) -> KMatrix:
        return self.f.block(slice(0, self.n))

    @property
    def f2(self) -> KMatrix:
        return self.f.block(slice(self.n, None))

    def check(self, tol: ToleranceConfig = DEFAULT_TOL) -> "StiefelPoint":
        if not is_isometry(self.f, tol):
            raise NotIsometricError(f"isometry residual {isometry_residual(self.f):.3g}")
        return self

    def to_json(self) -> dict:
        return {"n": self.n, "m": self.m, "f": self.f.to_json()}

    @classmethod
    def from_json(cls, obj) -> "StiefelPoint":
        f = KMatrix.from_json(obj["f"])
        return cls(f, int(obj["n"]), int(obj["m"]))


@dataclass(frozen=True)
class CayleyCoords:
    """``Y: K^k -> K^m`` and a skew-adjoint ``X`` on ``K^k``."""

    Y: KMatrix
    X: KMatrix

    def __post_init__(self):
        if self.X.rows != self.X.cols or self.Y.cols != self.X.rows:
            raise DimensionError("need Y of shape (m, k) and X of shape (k, k)")
        if self.Y.field is not self.X.field:
            raise FieldMismatchError("Y and X live over different fields")

    @property
    def k(self) -> int:
        return self.X.rows

    @property
    def m(self) -> int:
        return self.Y.rows

    @property
    def field(self) -> Field:
        return self.X.field

    def to_json(self) -> dict:
        return {"Y": self.Y.to_json(), "X": self.X.to_json()}

    @classmethod
    def from_json(cls, obj) -> "CayleyCoords":
        return cls(KMatrix.from_json(obj["Y"]), KMatrix.from_json(obj["X"]))


@dataclass(frozen=True)
class StratumCoords:
    """A representative ``(psi, Y, X)`` of a point of the open stratum of level ``k``."""

    psi: KMatrix
    coords: CayleyCoords

    def to_json(self) -> dict:
        return {"psi": self.psi.to_json(), **self.coords.to_json()}

    @classmethod
    def from_json(cls, obj) -> "StratumCoords":
        return cls(KMatrix.from_json(obj["psi"]), CayleyCoords.from_json(obj))


@dataclass(frozen=True)
class InLowerStratum:
    level: int


@dataclass(frozen=True)
class AboveStratum:
    level: int


def inclusion(n: int, m: int, field) -> StiefelPoint:
    """The first-summand inclusion ``i1``; it has level 0."""
    field = Field.parse(field)
    return StiefelPoint(vstack(identity(n, field), zeros(m, n, field)), n, m)


# columns of f are unit vectors, so rank decisions about f - i1 and 1 - g
# are made against an absolute threshold eps_rank
LEVEL_SCALE = 1.0


def _moved(p: StiefelPoint) -> KMatrix:
    return p.f - inclusion(p.n, p.m, p.field).f


def classify_level(p: StiefelPoint, tol: ToleranceConfig = DEFAULT_TOL) -> tuple[int, bool]:
    """Return the filtration level and whether a pivot sat within 10x of the rank threshold."""
    r, pivots, thresh = rank_profile(_moved(p), tol, LEVEL_SCALE)
    ambiguous = bool(thresh > 0 and np.any((pivots > thresh / 10) & (pivots < thresh * 10)))
    return r, ambiguous


def filtration_level(p: StiefelPoint, tol: ToleranceConfig = DEFAULT_TOL) -> int:
    return rank(_moved(p), tol, LEVEL_SCALE)


def stabilize(p: StiefelPoint) -> StiefelPoint:
    """Image under ``K^m -> K^(m+1)``: append a zero row."""
    return StiefelPoint(vstack(p.f, zeros(1, p.n, p.field)), p.n, p.m + 1)


def cayley(c: CayleyCoords, tol: ToleranceConfig = DEFAULT_TOL) -> StiefelPoint:
    """The open embedding ``(Y, X) -> (g, h)`` onto the top stratum.

    With ``C = X/2 + Y*Y/4``: ``g = (C - 1)(C + 1)^-1`` and ``h = Y(1 - g)/2``.
    ``C + 1`` is always invertible for skew-adjoint ``X``.
    """
    k, field = c.k, c.field
    eye = identity(k, field)
    C = c.X / 2 + (adjoint(c.Y) @ c.Y) / 4
    g = (C - eye) @ gauss_inverse(C + eye, tol)
    h = c.Y @ (eye - g) / 2
    return StiefelPoint(vstack(g, h), k, c.m)


def cayley_inv(p: StiefelPoint, tol: ToleranceConfig = DEFAULT_TOL) -> CayleyCoords:
    """Inverse of :func:`cayley` on points of full level.

    Raises
    ------
    LevelDeficientError
        If ``1 - g`` is singular, i.e. the point lies in a lower filtration stage.
    """
    g, h = p.f1, p.f2
    one_minus_g = identity(p.n, p.field) - g
    if rank(one_minus_g, tol, LEVEL_SCALE) < p.n:
        raise LevelDeficientError("1 - g is singular: point is not in the top stratum")
    W = gauss_inverse(one_minus_g, tol)
    Y = 2 * (h @ W)
    X = 2 * (adjoint(W) @ (g - adjoint(g)) @ W)
    return CayleyCoords(Y, X)


def conjugate_embedding(psi: KMatrix, p: StiefelPoint, tol: ToleranceConfig = DEFAULT_TOL) -> StiefelPoint:
    """Extend ``p`` along an isometric embedding ``psi: K^n -> K^N`` by the identity on the complement."""
    if psi.cols != p.n:
        raise DimensionError(f"psi has {psi.cols} columns, point has n = {p.n}")
    if psi.field is not p.field:
        raise FieldMismatchError("psi and point live over different fields")
    if not is_isometry(psi, tol):
        raise NotIsometricError(f"psi isometry residual {isometry_residual(psi):.3g}")
    N = psi.rows
    psis = adjoint(psi)
    top = psi @ p.f1 @ psis + identity(N, p.field) - psi @ psis
    bottom = p.f2 @ psis
    return StiefelPoint(vstack(top, bottom), N, p.m)


def galois_act(t: GaloisElement, p: StiefelPoint) -> StiefelPoint:
    """Entrywise Galois twist of the matrix of ``f`` (coordinates in the basis ``e_a (x) 1``)."""
    if t.field is not p.field:
        raise FieldMismatchError("Galois element and point live over different fields")
    return StiefelPoint(KMatrix(p.field, galois_apply_array(t, p.f.data)), p.n, p.m)


# -- zeta ---------------------------------------------------------------------


@dataclass(frozen=True)
class ZetaMap:
    field: Field
    k: int
    matrix: KMatrix

    def __call__(self, x: KMatrix) -> KMatrix:
        return self.matrix @ x


def _zeta_signs(d: int) -> np.ndarray:
    eps = -np.ones(d)
    eps[0] = 1.0
    return eps


def zeta(field, k: int) -> ZetaMap:
    """Matrix of the K-linear isometric embedding ``K^k -> (u K^k) (x)_R K``.

    The target is written in the basis ``(e_a * l) (x) 1`` with ``l`` running
    over ``1, i`` (C) or ``1, i, j, k`` (H); row ``a*d + s`` holds the
    coefficient of ``(e_a * l_s) (x) 1``.
    """
    field = Field.parse(field)
    if field is Field.R:
        raise ValueError("zeta is only constructed for C and H")
    d = field.dim
    c = 1.0 / math.sqrt(d)
    col = np.zeros((d, d))
    eps = _zeta_signs(d)
    for s in range(d):
        col[s, s] = c * eps[s]
    data = np.zeros((d * k, k, d))
    for a in range(k):
        data[a * d:(a + 1) * d, a, :] = col
    return ZetaMap(field, k, KMatrix(field, data))


def zeta_formula(field, x: np.ndarray) -> np.ndarray:
    """Evaluate ``zeta(x) = c * sum_l eps_l (x l) (x) l`` term by term.

    ``x`` is a ``(k, d)`` coefficient array; the result is ``(d*k, d)`` in the
    same basis as :func:`zeta`.  Independent of the matrix assembly there.
    """
    field = Field.parse(field)
    d = field.dim
    k = x.shape[0]
    eps = _zeta_signs(d)
    out = np.zeros((d * k, d))
    basis = np.eye(d)
    for r in range(d):
        xl = kmul(x, basis[r][None, :])  # x * l_r, shape (k, d)
        for a in range(k):
            for s in range(d):
                out[a * d + s] += eps[r] * xl[a, s] * basis[r]
    return out / math.sqrt(d)


def extension_galois(t: GaloisElement, v: np.ndarray) -> np.ndarray:
    """Apply ``tau^k (x) tau`` to a coefficient array of ``(u K^k) (x) K`` of shape ``(d*k, d)``.

    ``tau^k`` acts R-linearly on the real basis ``e_a * l_s`` through the real
    matrix of ``tau`` on K; the second factor is twisted entrywise.
    """
    d = t.field.dim
    R = t.real_matrix()
    twisted = galois_apply_array(t, v)
    k = v.shape[0] // d
    blocks = twisted.reshape(k, d, d)
    return np.einsum("ts,asc->atc", R, blocks).reshape(k * d, d)


# -- strata -------------------------------------------------------------------


def stratum_decompose(p: StiefelPoint, k: int, tol: ToleranceConfig = DEFAULT_TOL):
    """Coordinates ``(psi, Y, X)`` of a point of level exactly ``k``.

    Returns :class:`InLowerStratum` or :class:`AboveStratum` when the level
    differs from ``k``.  ``psi`` is the Gram-Schmidt basis of
    ``im((f - i1)*)`` taken in column order, one representative of the
    ``I(k)``-orbit.

    Raises
    ------
    AmbiguousRankError
        If the level decision is within a factor 10 of the rank threshold.
    """
    r, ambiguous = classify_level(p, tol)
    if ambiguous:
        raise AmbiguousRankError(f"filtration level {r} is numerically ambiguous at eps_rank={tol.eps_rank}")
    if r > k:
        return AboveStratum(r)
    if r < k:
        return InLowerStratum(r)
    psi = image_orthobasis(adjoint(_moved(p)), tol)
    if psi.cols != k:
        raise AmbiguousRankError(f"orthobasis found {psi.cols} directions, elimination found {k}")
    psis = adjoint(psi)
    compressed = vstack(psis @ p.f1 @ psi, p.f2 @ psi)
    coords = cayley_inv(StiefelPoint(compressed, k, p.m), tol)
    return StratumCoords(psi, coords)


def stratum_reconstruct(s: StratumCoords, n: int, m: int, tol: ToleranceConfig = DEFAULT_TOL) -> StiefelPoint:
    if s.psi.rows != n or s.psi.cols != s.coords.k or s.coords.m != m:
        raise DimensionError(
            f"psi {s.psi.shape} and coords (k={s.coords.k}, m={s.coords.m}) do not fit n={n}, m={m}"
        )
    return conjugate_embedding(s.psi, cayley(s.coords, tol), tol)
