import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st
from sympy.utilities.iterables import partitions

from kstiefel.algebra import Field
from kstiefel.series import (
    MAX_DEGREE,
    PowerSeries,
    product_poincare,
    rep_dims,
    series_compare,
    thom_dimension_table,
    wedge_poincare,
)

FIELD_LIST = [Field.R, Field.C, Field.H]
t = sympy.Symbol("t")


def count_partitions(n, max_part):
    """Partitions of n with every part <= max_part, by enumeration."""
    if n == 0:
        return 1
    return sum(1 for _ in partitions(n, k=max_part))


def wedge_oracle(field, N):
    d = field.dim
    out = [0] * (N + 1)
    k = 0
    while rep_dims(field, k).dim_ad <= N:
        shift = rep_dims(field, k).dim_ad
        for n in range(shift, N + 1):
            if (n - shift) % d == 0:
                out[n] += count_partitions((n - shift) // d, k) if k else int(n == shift)
        k += 1
    return out


def product_oracle(field, N):
    if field is Field.R:
        factors, lead = range(1, N + 1), 2
    elif field is Field.C:
        factors, lead = range(1, N + 1, 2), 1
    else:
        factors, lead = range(3, N + 1, 4), 1
    poly = sympy.Poly(lead, t)
    for a in factors:
        poly = sympy.Poly((poly * sympy.Poly(1 + t**a, t)).as_expr(), t)
        poly = sympy.Poly(sum(c * t**e for (e,), c in poly.terms() if e <= N), t)
    return [int(poly.coeff_monomial(t**n)) for n in range(N + 1)]


# -- worked examples ------------------------------------------------------------------------


def test_rep_dims_examples():
    r = rep_dims(Field.R, 2)
    assert (r.dim_ad, r.dim_sa) == (1, 3)
    r = rep_dims(Field.H, 2)
    assert (r.dim_ad, r.dim_sa) == (10, 6)
    for f in FIELD_LIST:
        r = rep_dims(f, 0, 3)
        assert (r.dim_nu, r.dim_ad, r.dim_sa) == (0, 0, 0)


@pytest.mark.parametrize("field", FIELD_LIST, ids=["R", "C", "H"])
def test_dimension_ledger(field):
    for k in range(13):
        r = rep_dims(field, k)
        assert r.dim_ad + r.dim_sa == field.dim * k * k


def test_rep_dims_rejects_negative():
    with pytest.raises(ValueError):
        rep_dims(Field.C, -1)


def test_wedge_examples():
    assert wedge_poincare(Field.C, 2, k_max=1).coeffs == (1, 1, 0)
    assert wedge_poincare(Field.H, 2).coeffs == (1, 0, 0)
    for f in (Field.C, Field.H):
        assert wedge_poincare(f, 0).coeffs == (1,)
    # over R the k = 0 and k = 1 summands both sit in degree 0
    assert wedge_poincare(Field.R, 0).coeffs == (2,)


def test_product_examples():
    assert product_poincare(Field.C, 4).coeffs == (1, 1, 0, 1, 1)
    assert product_poincare(Field.H, 2).coeffs == (1, 0, 0)
    assert product_poincare(Field.R, 0).coeffs == (2,)


@pytest.mark.parametrize("field", FIELD_LIST, ids=["R", "C", "H"])
def test_series_compare_at_60_and_120(field):
    assert series_compare(field, 60) == (True, None)
    assert series_compare(field, 120) == (True, None)


def test_thom_table_examples():
    assert [v for _, v in thom_dimension_table(Field.R, 0, 4)] == [0, 0, 1, 3, 6]
    assert thom_dimension_table(Field.C, 1, 1)[1] == (1, 3)
    for f in FIELD_LIST:
        assert thom_dimension_table(f, 5, 0) == [(0, 0)]


@pytest.mark.parametrize("field", FIELD_LIST, ids=["R", "C", "H"])
def test_thom_dimensions_grow_with_m(field):
    for m in range(4):
        lo, hi = thom_dimension_table(field, m, 6), thom_dimension_table(field, m + 1, 6)
        for (k, a), (_, b) in zip(lo, hi):
            if k:
                assert b - a == field.dim * k


# -- independent oracles --------------------------------------------------------------------


@pytest.mark.parametrize("field", FIELD_LIST, ids=["R", "C", "H"])
def test_wedge_side_matches_partition_count(field):
    assert list(wedge_poincare(field, 40).coeffs) == wedge_oracle(field, 40)


@pytest.mark.parametrize("field", FIELD_LIST, ids=["R", "C", "H"])
def test_product_side_matches_sympy_expansion(field):
    assert list(product_poincare(field, 40).coeffs) == product_oracle(field, 40)


@pytest.mark.parametrize("field", FIELD_LIST, ids=["R", "C", "H"])
def test_wedge_side_matches_geometric_expansion(field):
    # each 1/(1 - t^a) expanded as a truncated geometric sum, multiplied out with sympy
    N = 40
    d = field.dim

    def trunc(poly):
        return sympy.Poly(sum(c * t**e for (e,), c in poly.terms() if e <= N) or 0, t)

    total = sympy.Poly(0, t)
    k = 0
    while rep_dims(field, k).dim_ad <= N:
        term = sympy.Poly(t ** rep_dims(field, k).dim_ad, t)
        for j in range(1, k + 1):
            geometric = sympy.Poly(sum(t ** (d * j * n) for n in range(N // (d * j) + 1)), t)
            term = trunc(term * geometric)
        total = total + term
        k += 1
    ref = [int(total.coeff_monomial(t**n)) for n in range(N + 1)]
    assert list(wedge_poincare(field, N).coeffs) == ref


@pytest.mark.parametrize("field", FIELD_LIST, ids=["R", "C", "H"])
def test_coefficients_are_nonnegative_integers(field):
    for s in (wedge_poincare(field, 200), product_poincare(field, 200)):
        assert all(isinstance(c, int) and c >= 0 for c in s.coeffs)


def test_max_degree_is_enforced():
    assert series_compare(Field.H, MAX_DEGREE) == (True, None)
    with pytest.raises(ValueError):
        wedge_poincare(Field.C, MAX_DEGREE + 1)
    with pytest.raises(ValueError):
        product_poincare(Field.C, -1)


# -- power series arithmetic ------------------------------------------------------------------


small = st.lists(st.integers(-50, 50), min_size=1, max_size=12)


@given(small, small)
def test_series_product_matches_polynomial_product(a, b):
    N = min(len(a), len(b)) - 1
    prod = PowerSeries(a) * PowerSeries(b)
    ref = sympy.Poly(sum(c * t**i for i, c in enumerate(a)), t) * sympy.Poly(sum(c * t**i for i, c in enumerate(b)), t)
    assert list(prod.coeffs) == [int(ref.coeff_monomial(t**n)) for n in range(N + 1)]


@given(small, st.integers(1, 6))
def test_over_one_minus_inverts_times_one_minus(a, e):
    s = PowerSeries(a)
    minus = s + PowerSeries.monomial(e, s.N, -1) * s
    assert minus.over_one_minus(e) == s


@given(small, st.integers(1, 6))
def test_times_one_plus(a, e):
    s = PowerSeries(a)
    assert s.times_one_plus(e) == s + s.shift(e)
