"""Exact Poincare-series bookkeeping for the wedge decomposition of O, U and Sp.

The wedge side sums, over ``k``, the Thom-shifted series of the classifying
space of ``I(k)``; the product side is the closed form for the homology of the
infinite group.  All coefficients are Python integers.
"""
from __future__ import annotations

from dataclasses import dataclass

from .algebra import Field

__all__ = [
    "PowerSeries",
    "RepDims",
    "MAX_DEGREE",
    "rep_dims",
    "wedge_poincare",
    "product_poincare",
    "series_compare",
    "thom_dimension_table",
]

MAX_DEGREE = 512


class PowerSeries:
    """A formal power series with integer coefficients, truncated after degree ``N``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs, N: int | None = None):
        c = [int(x) for x in coeffs]
        if N is not None:
            c = (c + [0] * (N + 1))[: N + 1]
        if not c:
            raise ValueError("a truncated series needs at least the constant term")
        self.coeffs = tuple(c)

    @property
    def N(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def one(cls, N: int) -> "PowerSeries":
        return cls([1], N)

    @classmethod
    def monomial(cls, degree: int, N: int, coeff: int = 1) -> "PowerSeries":
        c = [0] * (N + 1)
        if degree <= N:
            c[degree] = coeff
        return cls(c)

    def __add__(self, other: "PowerSeries") -> "PowerSeries":
        N = min(self.N, other.N)
        return PowerSeries([a + b for a, b in zip(self.coeffs[: N + 1], other.coeffs[: N + 1])])

    def __mul__(self, other):
        if isinstance(other, int):
            return PowerSeries([other * a for a in self.coeffs])
        N = min(self.N, other.N)
        out = [0] * (N + 1)
        for i, a in enumerate(self.coeffs[: N + 1]):
            if a:
                for j, b in enumerate(other.coeffs[: N + 1 - i]):
                    out[i + j] += a * b
        return PowerSeries(out)

    __rmul__ = __mul__

    def shift(self, degree: int) -> "PowerSeries":
        """Multiply by ``t^degree`` (keeping the truncation order)."""
        return PowerSeries([0] * degree + list(self.coeffs), self.N)

    def times_one_plus(self, a: int) -> "PowerSeries":
        """Multiply by ``1 + t^a``."""
        c = list(self.coeffs)
        for i in range(self.N, a - 1, -1):
            c[i] += c[i - a]
        return PowerSeries(c)

    def over_one_minus(self, a: int) -> "PowerSeries":
        """Multiply by ``1 / (1 - t^a)``."""
        c = list(self.coeffs)
        for i in range(a, self.N + 1):
            c[i] += c[i - a]
        return PowerSeries(c)

    def __eq__(self, other):
        if not isinstance(other, PowerSeries):
            return NotImplemented
        return self.coeffs == other.coeffs

    __hash__ = None

    def __repr__(self):
        terms = [f"{c}t^{i}" for i, c in enumerate(self.coeffs) if c]
        return f"PowerSeries({' + '.join(terms) or '0'}; O(t^{self.N + 1}))"


@dataclass(frozen=True)
class RepDims:
    field: Field
    k: int
    m: int
    dim_nu: int
    dim_ad: int
    dim_sa: int


def _dim_ad(field: Field, k: int) -> int:
    if field is Field.R:
        return k * (k - 1) // 2
    if field is Field.C:
        return k * k
    return k * (2 * k + 1)


def _dim_sa(field: Field, k: int) -> int:
    if field is Field.R:
        return k * (k + 1) // 2
    if field is Field.C:
        return k * k
    return k * (2 * k - 1)


def rep_dims(field, k: int, m: int = 0) -> RepDims:
    """Real dimensions of ``Hom(K^k, K^m)``, the skew-adjoint and the self-adjoint ``k x k`` matrices."""
    field = Field.parse(field)
    if k < 0 or m < 0:
        raise ValueError("k and m must be non-negative")
    return RepDims(field, k, m, field.dim * k * m, _dim_ad(field, k), _dim_sa(field, k))


def _check_degree(N: int) -> None:
    if not 0 <= N <= MAX_DEGREE:
        raise ValueError(f"degree must lie in [0, {MAX_DEGREE}]")


def wedge_poincare(field, N: int, k_max: int | None = None) -> PowerSeries:
    """``sum_k t^dim_ad(k) / prod_{j<=k} (1 - t^(d j))`` through degree ``N``.

    ``k_max`` truncates the sum over summands; by default every summand with
    Thom shift ``<= N`` is included.
    """
    field = Field.parse(field)
    _check_degree(N)
    d = field.dim
    total = PowerSeries([0], N)
    classifying = PowerSeries.one(N)
    k = 0
    while _dim_ad(field, k) <= N and (k_max is None or k <= k_max):
        if k:
            classifying = classifying.over_one_minus(d * k)
        total = total + classifying.shift(_dim_ad(field, k))
        k += 1
    return total


def product_poincare(field, N: int) -> PowerSeries:
    """Closed product form: ``2 prod(1 + t^i)`` (R), ``prod(1 + t^(2i-1))`` (C), ``prod(1 + t^(4i-1))`` (H)."""
    field = Field.parse(field)
    _check_degree(N)
    out = PowerSeries.one(N)
    if field is Field.R:
        degrees = range(1, N + 1)
        out = out * 2
    elif field is Field.C:
        degrees = range(1, N + 1, 2)
    else:
        degrees = range(3, N + 1, 4)
    for a in degrees:
        out = out.times_one_plus(a)
    return out


def series_compare(field, N: int) -> tuple[bool, int | None]:
    """Coefficientwise comparison of the wedge and product sides; returns ``(equal, first_mismatch)``."""
    w = wedge_poincare(field, N).coeffs
    p = product_poincare(field, N).coeffs
    for i, (a, b) in enumerate(zip(w, p)):
        if a != b:
            return False, i
    return True, None


def thom_dimension_table(field, m: int, k_max: int) -> list[tuple[int, int]]:
    """``(k, dim(nu(k, m) + ad(k)))`` for ``k = 0 .. k_max``."""
    out = []
    for k in range(k_max + 1):
        r = rep_dims(field, k, m)
        out.append((k, r.dim_nu + r.dim_ad))
    return out
