"""Scalar arithmetic over R, C and H, and their groups of R-algebra automorphisms.

Scalars are stored as arrays of real coefficients along a trailing axis of
length ``d`` (1, 2 or 4): ``(re,)``, ``(re, im)`` or ``(re, i, j, k)``.  The
array kernels ``kmul``/``kconj``/``knorm`` work on any leading shape so that
matrix code can reuse them entrywise.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "Field",
    "FieldMismatchError",
    "Quaternion",
    "ScalarValue",
    "GaloisElement",
    "kmul",
    "kconj",
    "knorm",
    "scalar_mul",
    "conjugate",
    "galois_apply",
    "galois_compose",
    "galois_inverse",
    "galois_equal",
    "galois_identity",
    "galois_apply_array",
    "scalar_to_json",
    "scalar_from_json",
    "galois_to_json",
    "galois_from_json",
    "kmatmul",
    "kinv",
]


class FieldMismatchError(ValueError):
    pass


class Field(enum.Enum):
    R = "R"
    C = "C"
    H = "H"

    @property
    def dim(self) -> int:
        return _DIMS[self]

    @classmethod
    def parse(cls, value) -> "Field":
        if isinstance(value, Field):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ValueError(f"unknown field {value!r}; expected R, C or H") from None


_DIMS = {Field.R: 1, Field.C: 2, Field.H: 4}


def _check_same(a: Field, b: Field) -> None:
    if a is not b:
        raise FieldMismatchError(f"field mismatch: {a.value} vs {b.value}")


# (left basis index, right basis index, product basis index, sign)
_TABLES = {
    1: ((0, 0, 0, 1.0),),
    2: ((0, 0, 0, 1.0), (0, 1, 1, 1.0), (1, 0, 1, 1.0), (1, 1, 0, -1.0)),
    4: (
        (0, 0, 0, 1.0), (0, 1, 1, 1.0), (0, 2, 2, 1.0), (0, 3, 3, 1.0),
        (1, 0, 1, 1.0), (1, 1, 0, -1.0), (1, 2, 3, 1.0), (1, 3, 2, -1.0),
        (2, 0, 2, 1.0), (2, 1, 3, -1.0), (2, 2, 0, -1.0), (2, 3, 1, 1.0),
        (3, 0, 3, 1.0), (3, 1, 2, 1.0), (3, 2, 1, -1.0), (3, 3, 0, -1.0),
    ),
}


def _structure(d: int) -> np.ndarray:
    # T[x, y, z]: coefficient of basis element z in (e_x * e_y)
    T = np.zeros((d, d, d))
    for x, y, z, sign in _TABLES[d]:
        T[x, y, z] = sign
    return T


_STRUCTURE = {d: _structure(d) for d in _TABLES}
# T[x, y, z] flattened to (x, (y, z)) for the left-multiplication matrices
_FLAT = {d: T.reshape(d, d * d) for d, T in _STRUCTURE.items()}


def _dim_of(a: np.ndarray, b: np.ndarray) -> int:
    d = a.shape[-1]
    if b.shape[-1] != d or d not in _STRUCTURE:
        raise FieldMismatchError("coefficient axes differ")
    return d


def kmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Entrywise product ``a * b`` of coefficient arrays (broadcasting)."""
    if type(a) is not np.ndarray or a.dtype != np.float64:
        a = np.asarray(a, dtype=float)
    if type(b) is not np.ndarray or b.dtype != np.float64:
        b = np.asarray(b, dtype=float)
    d = _dim_of(a, b)
    if d == 1:
        return a * b
    # left-multiplication matrices L[..., y, z]; the product is the row vector b @ L
    left = (a @ _FLAT[d]).reshape(a.shape[:-1] + (d, d))
    return (b[..., None, :] @ left)[..., 0, :]


def kmatmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product of coefficient arrays of shape ``(n, p, d)`` and ``(p, m, d)``."""
    d = _dim_of(a, b)
    if d == 1:
        return (a[..., 0] @ b[..., 0])[..., None]
    n, p, _ = a.shape
    m = b.shape[1]
    # left[i, (p, y), z] = sum_x a[i, p, x] T[x, y, z]; contract (p, y) against b[p, j, y]
    left = (a @ _FLAT[d]).reshape(n, p * d, d)
    right = b.transpose(0, 2, 1).reshape(p * d, m)
    return (left.transpose(0, 2, 1) @ right).transpose(0, 2, 1)


_CONJ_SIGN = {d: np.array([1.0] + [-1.0] * (d - 1)) for d in _TABLES}


def kconj(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    return a * _CONJ_SIGN[a.shape[-1]]


def knorm(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    if a.shape[-1] == 1:
        return np.abs(a[..., 0])
    return np.sqrt((a * a).sum(axis=-1))


def kinv(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    if a.shape[-1] == 1:
        return 1.0 / a
    n2 = (a * a).sum(axis=-1, keepdims=True)
    return kconj(a) / n2


@dataclass(frozen=True)
class Quaternion:
    """A quaternion ``re + i*i + j*j + k*k`` with the Hamilton product."""

    re: float = 0.0
    i: float = 0.0
    j: float = 0.0
    k: float = 0.0

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Quaternion(self.re * other, self.i * other, self.j * other, self.k * other)
        a1, b1, c1, d1 = self
        a2, b2, c2, d2 = other
        return Quaternion(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )

    def __rmul__(self, other):
        # only real scalars land here, and they commute
        return self * other

    def __add__(self, other):
        return Quaternion(*(x + y for x, y in zip(self, other)))

    def __sub__(self, other):
        return Quaternion(*(x - y for x, y in zip(self, other)))

    def __neg__(self):
        return Quaternion(-self.re, -self.i, -self.j, -self.k)

    def __iter__(self):
        return iter((self.re, self.i, self.j, self.k))

    def conj(self) -> "Quaternion":
        return Quaternion(self.re, -self.i, -self.j, -self.k)

    def norm(self) -> float:
        return math.sqrt(self.re**2 + self.i**2 + self.j**2 + self.k**2)

    def inverse(self) -> "Quaternion":
        n2 = self.norm() ** 2
        if n2 == 0.0:
            raise ZeroDivisionError("zero quaternion has no inverse")
        return self.conj() * (1.0 / n2)


class ScalarValue:
    """An element of R, C or H tagged with its field.

    ``coeffs`` holds ``d`` real coefficients; complex numbers are real pairs,
    never quaternions with vanishing j, k parts.
    """

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        field = Field.parse(field)
        arr = np.asarray(coeffs, dtype=float).reshape(-1)
        if arr.shape != (field.dim,):
            raise ValueError(f"{field.value} scalar needs {field.dim} coefficients, got {arr.size}")
        arr.flags.writeable = False
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coeffs", arr)

    def __setattr__(self, name, value):
        raise AttributeError("ScalarValue is immutable")

    @classmethod
    def of(cls, value, field=None) -> "ScalarValue":
        """Build a scalar from a float, complex or Quaternion (field inferred if omitted)."""
        if isinstance(value, ScalarValue):
            return value
        if isinstance(value, Quaternion):
            return cls(field or Field.H, tuple(value))
        if isinstance(value, complex):
            f = Field.parse(field or Field.C)
            if f is Field.R:
                raise FieldMismatchError("complex value in a real field")
            c = [value.real, value.imag] + [0.0] * (f.dim - 2)
            return cls(f, c)
        f = Field.parse(field or Field.R)
        return cls(f, [float(value)] + [0.0] * (f.dim - 1))

    @property
    def value(self) -> Union[float, complex, Quaternion]:
        c = self.coeffs
        if self.field is Field.R:
            return float(c[0])
        if self.field is Field.C:
            return complex(c[0], c[1])
        return Quaternion(*map(float, c))

    @property
    def real(self) -> float:
        return float(self.coeffs[0])

    def norm(self) -> float:
        return float(knorm(self.coeffs))

    def conj(self) -> "ScalarValue":
        return ScalarValue(self.field, kconj(self.coeffs))

    def inverse(self) -> "ScalarValue":
        if not np.any(self.coeffs):
            raise ZeroDivisionError("zero scalar has no inverse")
        return ScalarValue(self.field, kinv(self.coeffs))

    def _coerce(self, other) -> "ScalarValue":
        if isinstance(other, ScalarValue):
            _check_same(self.field, other.field)
            return other
        if isinstance(other, (int, float)):
            return ScalarValue.of(other, self.field)
        return NotImplemented

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return ScalarValue(self.field, kmul(self.coeffs, other.coeffs))

    def __rmul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return ScalarValue(self.field, kmul(other.coeffs, self.coeffs))

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return ScalarValue(self.field, self.coeffs + other.coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return ScalarValue(self.field, self.coeffs - other.coeffs)

    def __neg__(self):
        return ScalarValue(self.field, -self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, ScalarValue):
            return NotImplemented
        return self.field is other.field and bool(np.array_equal(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.field, tuple(self.coeffs)))

    def isclose(self, other, atol: float = 1e-12) -> bool:
        other = self._coerce(other)
        return float(knorm(self.coeffs - other.coeffs)) <= atol

    def __repr__(self):
        return f"ScalarValue({self.field.value}, {list(map(float, self.coeffs))})"


def scalar_mul(a: ScalarValue, b: ScalarValue) -> ScalarValue:
    _check_same(a.field, b.field)
    return a * b


def conjugate(a: ScalarValue) -> ScalarValue:
    return a.conj()


def scalar_to_json(a: ScalarValue):
    if a.field is Field.R:
        return float(a.coeffs[0])
    return [float(x) for x in a.coeffs]


def scalar_from_json(obj, field) -> ScalarValue:
    field = Field.parse(field)
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        return ScalarValue.of(float(obj), field)
    if isinstance(obj, list) and len(obj) == field.dim and all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in obj
    ):
        return ScalarValue(field, obj)
    raise ValueError(f"malformed {field.value} scalar: {obj!r}")


# -- Galois group -------------------------------------------------------------

_UNIT_TOL = 1e-8
_EQ_TOL = 1e-12


def _canonical_unit(q: np.ndarray) -> np.ndarray:
    # sign fixed so that the first nonzero coefficient is positive
    for c in q:
        if abs(c) > _EQ_TOL:
            return q if c > 0 else -q
    return q


class GaloisElement:
    """An R-algebra automorphism of R, C or H.

    ``data`` is ``None`` over R, a conjugation flag over C, and over H a unit
    quaternion ``q`` acting by ``x -> q x q^-1``; ``q`` and ``-q`` give the
    same element and are stored in a canonical sign.
    """

    __slots__ = ("field", "data")

    def __init__(self, field, data=None):
        field = Field.parse(field)
        if field is Field.R:
            data = None
        elif field is Field.C:
            data = bool(data)
        else:
            q = np.asarray(tuple(data) if isinstance(data, Quaternion) else data, dtype=float)
            if q.shape != (4,):
                raise ValueError("quaternionic Galois element needs a unit quaternion")
            n = float(np.linalg.norm(q))
            if abs(n - 1.0) > _UNIT_TOL:
                raise ValueError(f"|q| = {n} is not 1")
            q = _canonical_unit(q / n)
            q.flags.writeable = False
            data = q
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "data", data)

    def __setattr__(self, name, value):
        raise AttributeError("GaloisElement is immutable")

    @classmethod
    def inner(cls, q) -> "GaloisElement":
        return cls(Field.H, q)

    @classmethod
    def complex_conjugation(cls) -> "GaloisElement":
        return cls(Field.C, True)

    def real_matrix(self) -> np.ndarray:
        """Matrix of the action on K in the real basis (1, i, j, k)."""
        d = self.field.dim
        return np.stack([galois_apply_array(self, e) for e in np.eye(d)], axis=1)

    def __eq__(self, other):
        if not isinstance(other, GaloisElement):
            return NotImplemented
        return galois_equal(self, other)

    def __hash__(self):
        if self.field is Field.H:
            return hash((self.field, tuple(np.round(self.data, 9))))
        return hash((self.field, self.data))

    def __repr__(self):
        if self.field is Field.H:
            return f"GaloisElement(H, inner{list(map(float, self.data))})"
        return f"GaloisElement({self.field.value}, {self.data})"


def galois_identity(field) -> GaloisElement:
    field = Field.parse(field)
    if field is Field.H:
        return GaloisElement(field, (1.0, 0.0, 0.0, 0.0))
    return GaloisElement(field, False)


def galois_apply_array(t: GaloisElement, a: np.ndarray) -> np.ndarray:
    """Apply ``t`` to every scalar of a coefficient array."""
    a = np.asarray(a, dtype=float)
    if a.shape[-1] != t.field.dim:
        raise FieldMismatchError(f"expected {t.field.dim} coefficients for {t.field.value}")
    if t.field is Field.R:
        return a.copy()
    if t.field is Field.C:
        return kconj(a) if t.data else a.copy()
    q = t.data
    return kmul(kmul(q, a), kconj(q))


def galois_apply(t: GaloisElement, a: ScalarValue) -> ScalarValue:
    _check_same(t.field, a.field)
    return ScalarValue(a.field, galois_apply_array(t, a.coeffs))


def galois_compose(s: GaloisElement, t: GaloisElement) -> GaloisElement:
    """The automorphism ``x -> s(t(x))``."""
    _check_same(s.field, t.field)
    if s.field is Field.R:
        return GaloisElement(Field.R)
    if s.field is Field.C:
        return GaloisElement(Field.C, s.data != t.data)
    q = kmul(s.data, t.data)
    return GaloisElement(Field.H, q / np.linalg.norm(q))


def galois_inverse(t: GaloisElement) -> GaloisElement:
    if t.field is Field.H:
        return GaloisElement(Field.H, kconj(t.data))
    return t


def galois_equal(s: GaloisElement, t: GaloisElement) -> bool:
    _check_same(s.field, t.field)
    if s.field is Field.H:
        # canonical signs can disagree when the leading coefficient is ~0
        gap = min(np.max(np.abs(s.data - t.data)), np.max(np.abs(s.data + t.data)))
        return bool(gap <= _EQ_TOL)
    return s.data == t.data


def galois_to_json(t: GaloisElement) -> dict:
    if t.field is Field.R:
        return {"field": "R"}
    if t.field is Field.C:
        return {"field": "C", "conjugate": t.data}
    return {"field": "H", "q": [float(x) for x in t.data]}


def galois_from_json(obj) -> GaloisElement:
    if not isinstance(obj, dict) or "field" not in obj:
        raise ValueError("Galois JSON must be an object with a 'field' key")
    field = Field.parse(obj["field"])
    if field is Field.R:
        return galois_identity(field)
    if field is Field.C:
        flag = obj.get("conjugate", False)
        if not isinstance(flag, bool):
            raise ValueError("'conjugate' must be true or false")
        return GaloisElement(field, flag)
    q = obj.get("q")
    if not isinstance(q, list) or len(q) != 4:
        raise ValueError("quaternionic Galois JSON needs 'q' = [re, i, j, k]")
    return GaloisElement(field, [float(x) for x in q])
