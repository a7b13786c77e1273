"""Dense matrices over R, C and H acting as right-K-linear maps.

A ``KMatrix`` with ``rows x cols`` entries represents ``K^cols -> K^rows`` by
``(M v)_i = sum_j M_ij v_j``; entries multiply vector coordinates from the
left, which is what makes the map right-K-linear.  Only real scalings are
offered as matrix-level operations for the same reason.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import (
    Field,
    FieldMismatchError,
    ScalarValue,
    kconj,
    kinv,
    kmatmul,
    kmul,
    knorm,
    scalar_from_json,
    scalar_to_json,
)

__all__ = [
    "KMatrix",
    "ToleranceConfig",
    "DEFAULT_TOL",
    "DimensionError",
    "SingularMatrixError",
    "matmul",
    "add",
    "real_scale",
    "identity",
    "zeros",
    "adjoint",
    "inner_product",
    "gauss_inverse",
    "rank",
    "rank_profile",
    "image_orthobasis",
    "is_isometry",
    "isometry_residual",
    "skew_self_split",
    "random_matrix",
    "random_isometry",
    "random_skew",
    "random_selfadjoint",
    "vstack",
    "max_norm",
]


class DimensionError(ValueError):
    pass


class SingularMatrixError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class ToleranceConfig:
    eps_iso: float = 1e-8
    eps_rank: float = 1e-8

    def __post_init__(self):
        if not (self.eps_iso > 0 and self.eps_rank > 0):
            raise ValueError("tolerances must be strictly positive")


DEFAULT_TOL = ToleranceConfig()


class KMatrix:
    """Immutable ``rows x cols`` matrix over a field, stored as a ``(rows, cols, d)`` array."""

    __slots__ = ("field", "data")

    def __init__(self, field, data):
        field = Field.parse(field)
        arr = np.array(data, dtype=float)
        if arr.ndim == 2 and field.dim == 1:
            arr = arr[..., None]
        if arr.ndim != 3 or arr.shape[-1] != field.dim:
            raise DimensionError(
                f"expected array of shape (rows, cols, {field.dim}) for field {field.value}, got {arr.shape}"
            )
        arr.flags.writeable = False
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "data", arr)

    def __setattr__(self, name, value):
        raise AttributeError("KMatrix is immutable")

    @classmethod
    def _wrap(cls, field: Field, arr: np.ndarray) -> "KMatrix":
        # internal: take ownership of a freshly computed (rows, cols, d) float array
        arr.flags.writeable = False
        out = object.__new__(cls)
        object.__setattr__(out, "field", field)
        object.__setattr__(out, "data", arr)
        return out

    @classmethod
    def from_entries(cls, field, entries) -> "KMatrix":
        """Build from nested rows of numbers, complex numbers, Quaternions or ScalarValues."""
        field = Field.parse(field)
        rows = [[ScalarValue.of(x, field).coeffs for x in row] for row in entries]
        if not rows:
            raise DimensionError("use zeros() for matrices without rows")
        width = {len(r) for r in rows}
        if len(width) != 1:
            raise DimensionError("ragged rows")
        return cls(field, np.array(rows, dtype=float).reshape(len(rows), width.pop(), field.dim))

    @classmethod
    def from_complex(cls, arr) -> "KMatrix":
        arr = np.asarray(arr, dtype=complex)
        return cls(Field.C, np.stack([arr.real, arr.imag], axis=-1))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape[:2]

    def __getitem__(self, idx) -> ScalarValue:
        i, j = idx
        return ScalarValue(self.field, self.data[i, j])

    def block(self, rows: slice, cols: slice = slice(None)) -> "KMatrix":
        return KMatrix(self.field, self.data[rows, cols])

    def _same(self, other: "KMatrix") -> None:
        if not isinstance(other, KMatrix):
            raise TypeError(f"expected KMatrix, got {type(other).__name__}")
        if self.field is not other.field:
            raise FieldMismatchError(f"field mismatch: {self.field.value} vs {other.field.value}")

    def __matmul__(self, other: "KMatrix") -> "KMatrix":
        return matmul(self, other)

    def __add__(self, other: "KMatrix") -> "KMatrix":
        return add(self, other)

    def __sub__(self, other: "KMatrix") -> "KMatrix":
        self._same(other)
        if self.shape != other.shape:
            raise DimensionError(f"cannot subtract {other.shape} from {self.shape}")
        return KMatrix._wrap(self.field, self.data - other.data)

    def __neg__(self) -> "KMatrix":
        return KMatrix._wrap(self.field, -self.data)

    def __mul__(self, c):
        if isinstance(c, (int, float, np.floating)):
            return real_scale(float(c), self)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, c):
        if isinstance(c, (int, float, np.floating)):
            return real_scale(1.0 / float(c), self)
        return NotImplemented

    @property
    def H(self) -> "KMatrix":
        return adjoint(self)

    def allclose(self, other: "KMatrix", atol: float = 1e-12) -> bool:
        self._same(other)
        return self.shape == other.shape and max_norm(self - other) <= atol

    def to_json(self) -> dict:
        return {
            "field": self.field.value,
            "rows": self.rows,
            "cols": self.cols,
            "entries": [[scalar_to_json(self[i, j]) for j in range(self.cols)] for i in range(self.rows)],
        }

    @classmethod
    def from_json(cls, obj) -> "KMatrix":
        if not isinstance(obj, dict):
            raise ValueError("matrix JSON must be an object")
        try:
            field = Field.parse(obj["field"])
            rows, cols = int(obj["rows"]), int(obj["cols"])
            entries = obj["entries"]
        except KeyError as exc:
            raise ValueError(f"matrix JSON lacks key {exc}") from None
        if rows < 0 or cols < 0 or not isinstance(entries, list) or len(entries) != rows:
            raise DimensionError("matrix JSON row count does not match 'rows'")
        data = np.zeros((rows, cols, field.dim))
        for i, row in enumerate(entries):
            if not isinstance(row, list) or len(row) != cols:
                raise DimensionError(f"matrix JSON row {i} does not have {cols} entries")
            for j, x in enumerate(row):
                data[i, j] = scalar_from_json(x, field).coeffs
        return cls(field, data)

    def __eq__(self, other):
        if not isinstance(other, KMatrix):
            return NotImplemented
        return self.field is other.field and np.array_equal(self.data, other.data)

    __hash__ = None

    def __repr__(self):
        return f"KMatrix({self.field.value}, {self.rows}x{self.cols})"


# -- basic arithmetic ----------------------------------------------------------


def matmul(A: KMatrix, B: KMatrix) -> KMatrix:
    A._same(B)
    if A.cols != B.rows:
        raise DimensionError(f"cannot multiply {A.rows}x{A.cols} by {B.rows}x{B.cols}")
    return KMatrix._wrap(A.field, np.ascontiguousarray(kmatmul(A.data, B.data)))


def add(A: KMatrix, B: KMatrix) -> KMatrix:
    A._same(B)
    if A.shape != B.shape:
        raise DimensionError(f"cannot add {A.shape} and {B.shape}")
    return KMatrix._wrap(A.field, A.data + B.data)


def real_scale(c: float, A: KMatrix) -> KMatrix:
    return KMatrix._wrap(A.field, float(c) * A.data)


def identity(n: int, field) -> KMatrix:
    field = Field.parse(field)
    data = np.zeros((n, n, field.dim))
    data[np.arange(n), np.arange(n), 0] = 1.0
    return KMatrix._wrap(field, data)


def zeros(rows: int, cols: int, field) -> KMatrix:
    field = Field.parse(field)
    return KMatrix._wrap(field, np.zeros((rows, cols, field.dim)))


def vstack(*blocks: KMatrix) -> KMatrix:
    field = blocks[0].field
    for b in blocks[1:]:
        blocks[0]._same(b)
    return KMatrix._wrap(field, np.concatenate([b.data for b in blocks], axis=0))


def adjoint(M: KMatrix) -> KMatrix:
    return KMatrix._wrap(M.field, np.ascontiguousarray(kconj(M.data.transpose(1, 0, 2))))


def max_norm(M: KMatrix) -> float:
    """Largest entry norm (0 for an empty matrix)."""
    if M.data.size == 0:
        return 0.0
    return float(knorm(M.data).max())


def inner_product(x: KMatrix, y: KMatrix) -> ScalarValue:
    """``[x, y] = sum conj(x_i) y_i`` for column vectors."""
    x._same(y)
    if x.cols != 1 or y.cols != 1 or x.rows != y.rows:
        raise DimensionError("inner product needs column vectors of equal length")
    return matmul(adjoint(x), y)[0, 0]


def skew_self_split(M: KMatrix) -> tuple[KMatrix, KMatrix]:
    """Return ``(X, Z)`` with ``X`` skew-adjoint, ``Z`` self-adjoint and ``M = X + Z``."""
    if M.rows != M.cols:
        raise DimensionError("skew/self-adjoint split needs a square matrix")
    Ms = adjoint(M)
    return KMatrix(M.field, (M.data - Ms.data) / 2), KMatrix(M.field, (M.data + Ms.data) / 2)


def isometry_residual(M: KMatrix) -> float:
    return max_norm(adjoint(M) @ M - identity(M.cols, M.field))


def is_isometry(M: KMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    return isometry_residual(M) <= tol.eps_iso


# -- elimination ---------------------------------------------------------------


def gauss_inverse(M: KMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> KMatrix:
    """Invert a square matrix by Gauss-Jordan elimination with partial pivoting.

    Row operations multiply rows by scalars from the left, so the same code is
    correct over the non-commutative quaternions.

    Raises
    ------
    SingularMatrixError
        If no admissible pivot exceeds ``eps_rank`` times the largest entry norm.
    """
    if M.rows != M.cols:
        raise DimensionError("inverse needs a square matrix")
    n = M.rows
    # augmented [M | 1]; every row operation acts on both halves at once
    a = np.concatenate([M.data, identity(n, M.field).data], axis=1)
    scale = max_norm(M)
    if n and scale == 0.0:
        raise SingularMatrixError("zero matrix is singular")
    thresh = tol.eps_rank * scale
    for c in range(n):
        norms = knorm(a[c:, c])
        best = int(np.argmax(norms))
        p = c + best
        if norms[best] <= thresh:
            raise SingularMatrixError(f"no pivot above {thresh:.3g} in column {c}")
        if p != c:
            a[[c, p]] = a[[p, c]]
        a[c] = kmul(kinv(a[c, c]), a[c])
        factors = a[:, c].copy()
        factors[c] = 0.0
        # row_i <- row_i - a_ic * row_c
        a -= kmul(factors[:, None, :], a[c][None, :, :])
    return KMatrix(M.field, a[:, n:])


def rank_profile(
    M: KMatrix, tol: ToleranceConfig = DEFAULT_TOL, scale: float | None = None
) -> tuple[int, np.ndarray, float]:
    """Eliminate with complete pivoting.

    Pivots at or below ``tol.eps_rank * scale`` count as zero; ``scale``
    defaults to the largest entry norm of ``M``.  Pass an explicit scale when
    ``M`` is a difference of comparable quantities (``f - i1``), whose own size
    says nothing about rounding noise.

    Returns ``(rank, pivot_norms, threshold)``; ``pivot_norms`` lists the norm
    of every pivot candidate in elimination order (accepted ones first, then
    the first rejected one if any), so callers can tell how close the
    decision was.
    """
    a = np.array(M.data)
    top = max_norm(M)
    if scale is None:
        scale = top
    thresh = tol.eps_rank * scale
    pivots = []
    r = 0
    rows, cols = M.shape
    if top == 0.0 or scale == 0.0:
        return 0, np.zeros(0), thresh
    while r < min(rows, cols):
        norms = knorm(a[r:, r:])
        flat = int(np.argmax(norms))
        i, j = divmod(flat, cols - r)
        best = float(norms[i, j])
        pivots.append(best)
        if best <= thresh:
            break
        i += r
        j += r
        if i != r:
            a[[r, i]] = a[[i, r]]
        if j != r:
            a[:, [r, j]] = a[:, [j, r]]
        piv = kinv(a[r, r])
        factors = kmul(a[r + 1:, r], piv)
        a[r + 1:, r:] -= kmul(factors[:, None, :], a[r, r:][None, :, :])
        a[r + 1:, r] = 0.0
        r += 1
    return r, np.array(pivots), thresh


def rank(M: KMatrix, tol: ToleranceConfig = DEFAULT_TOL, scale: float | None = None) -> int:
    return rank_profile(M, tol, scale)[0]


def image_orthobasis(M: KMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> KMatrix:
    """Orthonormal columns spanning the image of ``M``.

    Modified Gram-Schmidt over the columns in natural order with one full
    re-orthogonalization pass; a column is dropped when its residual falls
    below ``eps_rank`` times the largest column norm.
    """
    n = M.rows
    cols = [M.data[:, j, :] for j in range(M.cols)]
    scale = max((float(np.sqrt(np.sum(c * c))) for c in cols), default=0.0)
    basis: list[np.ndarray] = []
    conj: list[np.ndarray] = []
    for v in cols:
        w = np.array(v)
        for _ in range(2):
            for q, qc in zip(basis, conj):
                coef = np.sum(kmul(qc, w), axis=0)
                w -= kmul(q, coef[None, :])
        nrm = float(np.sqrt(np.sum(w * w)))
        if scale == 0.0 or nrm <= tol.eps_rank * scale:
            continue
        basis.append(w / nrm)
        conj.append(kconj(basis[-1]))
    if not basis:
        return zeros(n, 0, M.field)
    return KMatrix(M.field, np.stack(basis, axis=1))


# -- sampling ------------------------------------------------------------------


def random_matrix(rng: np.random.Generator, n: int, m: int, field) -> KMatrix:
    field = Field.parse(field)
    return KMatrix(field, rng.standard_normal((n, m, field.dim)))


def random_isometry(rng: np.random.Generator, n: int, k: int, field, attempts: int = 10) -> KMatrix:
    if k > n:
        raise DimensionError(f"no isometric embedding K^{k} -> K^{n}")
    for _ in range(attempts):
        Q = image_orthobasis(random_matrix(rng, n, k, field))
        if Q.cols == k:
            return Q
    raise RuntimeError("could not draw a full-rank matrix")


def random_skew(rng: np.random.Generator, k: int, field) -> KMatrix:
    return skew_self_split(random_matrix(rng, k, k, field))[0]


def random_selfadjoint(rng: np.random.Generator, k: int, field) -> KMatrix:
    return skew_self_split(random_matrix(rng, k, k, field))[1]
