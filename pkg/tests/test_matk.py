import json

import numpy as np
import pytest
from hypothesis import given

from kstiefel.algebra import Field, ScalarValue
from kstiefel.matk import (
    DimensionError,
    KMatrix,
    SingularMatrixError,
    ToleranceConfig,
    add,
    adjoint,
    gauss_inverse,
    identity,
    image_orthobasis,
    inner_product,
    is_isometry,
    isometry_residual,
    matmul,
    max_norm,
    random_isometry,
    random_matrix,
    random_selfadjoint,
    random_skew,
    rank,
    real_scale,
    skew_self_split,
    zeros,
)
from kstiefel.oracles import complex_form, real_form, real_rank

from conftest import seeds

FIELD_LIST = [Field.R, Field.C, Field.H]


def rng_for(seed):
    return np.random.default_rng(seed)


def scalar_col(field, value, n=1):
    return KMatrix(field, np.tile(ScalarValue.of(value, field).coeffs, (n, 1, 1)))


def test_identity_and_zero_scale(field, rng):
    A = random_matrix(rng, 3, 4, field)
    assert (identity(3, field) @ A).allclose(A)
    assert max_norm(real_scale(0.0, A)) == 0.0


def test_matmul_associative_over_H(rng):
    A, B, C = (random_matrix(rng, 3, 3, Field.H) for _ in range(3))
    assert max_norm((A @ B) @ C - A @ (B @ C)) <= 1e-10


@given(seeds)
def test_matmul_matches_real_and_complex_forms(seed):
    rng = rng_for(seed)
    for field in FIELD_LIST:
        A, B = random_matrix(rng, 3, 2, field), random_matrix(rng, 2, 4, field)
        np.testing.assert_allclose(real_form(A @ B), real_form(A) @ real_form(B), atol=1e-10)
        np.testing.assert_allclose(complex_form(A @ B), complex_form(A) @ complex_form(B), atol=1e-10)


def test_add_and_field_mismatch(rng):
    A = random_matrix(rng, 2, 2, Field.C)
    assert max_norm(add(A, -A)) == 0.0
    with pytest.raises(ValueError):
        add(A, random_matrix(rng, 2, 2, Field.H))
    with pytest.raises(DimensionError):
        matmul(A, random_matrix(rng, 3, 2, Field.C))


def test_adjoint_of_j():
    M = KMatrix.from_entries(Field.H, [[ScalarValue(Field.H, (0, 0, 1, 0))]])
    assert adjoint(M) == KMatrix.from_entries(Field.H, [[ScalarValue(Field.H, (0, 0, -1, 0))]])


def test_adjoint_involutive_and_adjoint_identity():
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(100):
        M = random_matrix(rng, 4, 3, Field.H)
        v, w = random_matrix(rng, 3, 1, Field.H), random_matrix(rng, 4, 1, Field.H)
        assert adjoint(adjoint(M)) == M
        worst = max(worst, (inner_product(M.H @ w, v) - inner_product(w, M @ v)).norm())
    assert worst < 1e-12


@given(seeds)
def test_adjoint_matches_conjugate_transpose_of_complex_form(seed):
    rng = rng_for(seed)
    for field in FIELD_LIST:
        M = random_matrix(rng, 3, 2, field)
        np.testing.assert_allclose(complex_form(adjoint(M)), complex_form(M).conj().T, atol=1e-12)


def test_inner_product_examples_and_sesquilinearity(rng):
    e1 = KMatrix(Field.H, np.eye(3)[:, :1, None] * np.array([1, 0, 0, 0]))
    assert inner_product(e1, e1) == ScalarValue(Field.H, (1, 0, 0, 0))
    for _ in range(50):
        x, y = random_matrix(rng, 3, 1, Field.H), random_matrix(rng, 3, 1, Field.H)
        lam = ScalarValue(Field.H, rng.standard_normal(4))
        mu = ScalarValue(Field.H, rng.standard_normal(4))
        xl = KMatrix(Field.H, (x @ KMatrix(Field.H, lam.coeffs[None, None, :])).data)
        ym = KMatrix(Field.H, (y @ KMatrix(Field.H, mu.coeffs[None, None, :])).data)
        lhs = inner_product(xl, ym)
        rhs = lam.conj() * inner_product(x, y) * mu
        assert lhs.isclose(rhs, atol=1e-10)
        xx = inner_product(x, x)
        assert np.all(xx.coeffs[1:] == 0) or max(abs(xx.coeffs[1:])) < 1e-12
        assert xx.coeffs[0] > 0


def test_inverse_examples():
    for field in FIELD_LIST:
        assert gauss_inverse(identity(3, field)).allclose(identity(3, field))
        assert gauss_inverse(2 * identity(2, field)).allclose(0.5 * identity(2, field))
    i = KMatrix(Field.C, [[[0.0, 1.0]]])
    assert gauss_inverse(i) == KMatrix(Field.C, [[[0.0, -1.0]]])


@given(seeds)
def test_inverse_matches_lapack_on_complex_form(seed):
    rng = rng_for(seed)
    for field in FIELD_LIST:
        M = random_matrix(rng, 4, 4, field)
        inv = gauss_inverse(M)
        np.testing.assert_allclose(complex_form(inv), np.linalg.inv(complex_form(M)), atol=1e-7)
        assert max_norm(M @ inv - identity(4, field)) < 1e-9
        assert max_norm(inv @ M - identity(4, field)) < 1e-9


def test_inverse_of_singular_raises(field, rng):
    A = random_matrix(rng, 4, 2, field)
    with pytest.raises(SingularMatrixError):
        gauss_inverse(A @ adjoint(A))
    with pytest.raises(DimensionError):
        gauss_inverse(A)


def test_rank_examples(field, rng):
    assert rank(zeros(4, 3, field)) == 0
    assert rank(identity(5, field)) == 5
    for k in range(0, 5):
        psi = random_isometry(rng, 5, k, field)
        assert rank(psi @ adjoint(psi)) == k


@given(seeds)
def test_rank_matches_svd_oracle(seed):
    rng = rng_for(seed)
    for field in FIELD_LIST:
        r = int(rng.integers(0, 5))
        M = random_matrix(rng, 5, r, field) @ random_matrix(rng, r, 6, field)
        assert rank(M) == real_rank(M) == r


def test_orthobasis_examples(field, rng):
    Q = image_orthobasis(identity(3, field))
    assert Q.shape == (3, 3) and is_isometry(Q)
    v = random_matrix(rng, 4, 1, field)
    outer = v @ adjoint(random_matrix(rng, 3, 1, field))
    q = image_orthobasis(outer)
    assert q.cols == 1
    # collinear: projecting v onto q recovers v
    assert max_norm(q @ adjoint(q) @ v - v) < 1e-10


@given(seeds)
def test_orthobasis_spans_the_image(seed):
    rng = rng_for(seed)
    for field in FIELD_LIST:
        r = int(rng.integers(1, 4))
        M = random_matrix(rng, 6, r, field) @ random_matrix(rng, r, 4, field)
        Q = image_orthobasis(M)
        assert Q.cols == r
        assert isometry_residual(Q) < 1e-10
        # projector of Q agrees with the LAPACK orthonormal basis of the complex form
        U, s, _ = np.linalg.svd(complex_form(M))
        U = U[:, : int(np.sum(s > 1e-8 * s[0]))]
        np.testing.assert_allclose(complex_form(Q @ adjoint(Q)), U @ U.conj().T, atol=1e-9)


def test_is_isometry_examples(field):
    assert is_isometry(identity(3, field))
    assert not is_isometry(real_scale(2.0, identity(3, field)))


def test_split_examples(field, rng):
    X, Z = skew_self_split(identity(3, field))
    assert max_norm(X) == 0 and Z == identity(3, field)
    S = random_skew(rng, 3, field)
    X, Z = skew_self_split(S)
    assert X.allclose(S) and max_norm(Z) < 1e-15
    M = random_matrix(rng, 4, 4, Field.H)
    X, Z = skew_self_split(M)
    assert max_norm(X + Z - M) <= 1e-15
    assert max_norm(X + adjoint(X)) == 0 and max_norm(Z - adjoint(Z)) == 0


def test_random_generators(field):
    Q = random_isometry(np.random.default_rng(5), 5, 3, field)
    assert is_isometry(Q)
    assert random_isometry(np.random.default_rng(5), 5, 3, field) == Q
    S = random_skew(np.random.default_rng(1), 4, field)
    assert np.all(S.data[np.arange(4), np.arange(4), 0] == 0)
    P = random_selfadjoint(np.random.default_rng(1), 4, field)
    assert max_norm(P - adjoint(P)) == 0
    with pytest.raises(DimensionError):
        random_isometry(np.random.default_rng(0), 2, 3, field)


@given(seeds)
def test_json_roundtrip(seed):
    rng = rng_for(seed)
    for field in FIELD_LIST:
        M = random_matrix(rng, int(rng.integers(0, 4)), int(rng.integers(0, 4)), field)
        back = KMatrix.from_json(json.loads(json.dumps(M.to_json())))
        assert back == M


@pytest.mark.parametrize(
    "obj",
    [
        {"field": "C", "rows": 2, "cols": 1, "entries": [[[1, 2]]]},
        {"field": "C", "rows": 1, "cols": 2, "entries": [[[1, 2], [3, 4, 5]]]},
        {"field": "Q", "rows": 0, "cols": 0, "entries": []},
        {"field": "R", "rows": 1, "cols": 1},
        [1, 2],
    ],
)
def test_json_rejects_malformed(obj):
    with pytest.raises(ValueError):
        KMatrix.from_json(obj)


def test_kmatrix_is_immutable(rng):
    A = random_matrix(rng, 2, 2, Field.C)
    with pytest.raises(ValueError):
        A.data[0, 0, 0] = 1.0
    with pytest.raises(AttributeError):
        A.field = Field.R


def test_tolerance_config_validates():
    with pytest.raises(ValueError):
        ToleranceConfig(eps_rank=0)
