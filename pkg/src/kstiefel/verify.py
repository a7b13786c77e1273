"""Randomized verification suites behind ``kstiefel verify`` and the acceptance tests.

Every trial draws its inputs from ``numpy.random.default_rng([seed, suite_id, trial])``
(PCG64 seeded through ``SeedSequence``), so a failure can be replayed from the
three integers recorded in the report.  ``suite_id`` is the CRC32 of the suite
name, which keeps ids stable when suites are added or reordered.
"""
from __future__ import annotations

import hashlib
import zlib
from dataclasses import asdict, dataclass, field as dc_field
from typing import Callable, Iterable

import numpy as np

from .algebra import Field, GaloisElement, galois_apply_array, galois_identity
from .matk import (
    KMatrix,
    adjoint,
    gauss_inverse,
    identity,
    inner_product,
    isometry_residual,
    max_norm,
    random_isometry,
    random_matrix,
    random_selfadjoint,
    random_skew,
    vstack,
)
from .oracles import eigvals_oracle, real_rank
from .series import series_compare, rep_dims
from .spectral import eigh, exp_matrix, polar_factor
from .splitting import (
    BASEPOINT,
    collapse_cflat,
    collapse_t,
    composite_F,
    hom_decompose,
    jacobian_origin_check,
    selfadjoint_basis,
    skew_basis,
)
from .stiefel import (
    CayleyCoords,
    LevelDeficientError,
    StiefelPoint,
    StratumCoords,
    cayley,
    cayley_inv,
    conjugate_embedding,
    extension_galois,
    filtration_level,
    galois_act,
    stratum_decompose,
    stratum_reconstruct,
    zeta,
    zeta_formula,
)

__all__ = ["VerifyReport", "SUITES", "run_suite", "run_all", "random_galois", "JACOBIAN_SHAPES"]

JACOBIAN_SHAPES = ((1, 0), (2, 1), (2, 2), (3, 1))


@dataclass
class VerifyReport:
    suite: str
    field: str
    trials: int
    tolerance: float
    max_residual: float
    failures: list = dc_field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        out = asdict(self)
        out["passed"] = self.passed
        return out


def _digest(arrays: Iterable) -> str:
    h = hashlib.sha256()
    for a in arrays:
        a = a.data if isinstance(a, KMatrix) else np.asarray(a, dtype=float)
        h.update(str(a.shape).encode())
        h.update(np.ascontiguousarray(a, dtype=float).tobytes())
    return h.hexdigest()[:16]


def random_galois(rng: np.random.Generator, field) -> GaloisElement:
    field = Field.parse(field)
    if field is Field.R:
        return galois_identity(field)
    if field is Field.C:
        return GaloisElement(field, bool(rng.integers(2)))
    q = rng.standard_normal(4)
    return GaloisElement.inner(q / np.linalg.norm(q))


def _random_coords(rng, field, k, m) -> CayleyCoords:
    return CayleyCoords(random_matrix(rng, m, k, field), random_skew(rng, k, field))


# -- trial functions: (rng, field) -> (metrics, inputs) -------------------------


def _trial_cayley_isometry(rng, field):
    k, m = int(rng.integers(1, 6)), int(rng.integers(0, 6))
    c = _random_coords(rng, field, k, m)
    p = cayley(c)
    eye = identity(k, field)
    C = c.X / 2 + (adjoint(c.Y) @ c.Y) / 4
    h_main = c.Y @ gauss_inverse(C + eye)
    return {
        "isometry": isometry_residual(p.f),
        "h-crosscheck": max_norm(h_main - p.f2),
    }, [c.Y, c.X]


def _random_top_point(rng, field, k, m, attempts: int = 50) -> tuple[StiefelPoint, CayleyCoords]:
    # over R with m = 0 only one component of O(k) meets the top stratum, so reject
    for _ in range(attempts):
        p = StiefelPoint(random_isometry(rng, k + m, k, field), k, m)
        try:
            return p, cayley_inv(p)
        except LevelDeficientError:
            continue
    raise RuntimeError("no top-stratum point drawn")


def _trial_cayley_bijective(rng, field):
    k, m = int(rng.integers(1, 6)), int(rng.integers(0, 6))
    c = _random_coords(rng, field, k, m)
    back = cayley_inv(cayley(c))
    p, coords = _random_top_point(rng, field, k, m)
    f = p.f
    again = cayley(coords).f
    return {
        "coords-roundtrip": max(max_norm(back.Y - c.Y), max_norm(back.X - c.X)),
        "point-roundtrip": max_norm(again - f),
        "skew": max_norm(back.X + adjoint(back.X)),
    }, [c.Y, c.X, f]


def _trial_spectral(rng, field):
    k = int(rng.integers(1, 9))
    X = random_selfadjoint(rng, k, field)
    dec = eigh(X)
    scale = max_norm(X)
    oracle = eigvals_oracle(X)
    return {
        "reconstruction": max_norm(dec.reconstruct() - X) / scale,
        "orthonormality": isometry_residual(dec.Q),
        "oracle": float(np.max(np.abs(np.sort(oracle) - dec.lam))),
    }, [X]


def _trial_polar(rng, field):
    k, m = int(rng.integers(1, 6)), int(rng.integers(0, 4))
    B = random_matrix(rng, k + m, k, field)
    pf = polar_factor(B)
    return {
        "reassembly": max_norm(pf.A @ exp_matrix(-pf.Z) - B) / max_norm(B),
        "isometry": isometry_residual(pf.A),
        "selfadjoint": max_norm(pf.Z - adjoint(pf.Z)),
    }, [B]


def _random_level_point(rng, field, n, m):
    k = int(rng.integers(0, n + 1))
    psi = random_isometry(rng, n, k, field)
    return stratum_reconstruct(StratumCoords(psi, _random_coords(rng, field, k, m)), n, m), k


def _trial_filtration(rng, field):
    n, m = int(rng.integers(1, 6)), int(rng.integers(0, 4))
    p, k = _random_level_point(rng, field, n, m)
    N = n + int(rng.integers(0, 3))
    psi = random_isometry(rng, N, n, field)
    t = random_galois(rng, field)
    level = filtration_level(p)
    return {
        "generated-level": abs(level - k),
        "conjugation": abs(filtration_level(conjugate_embedding(psi, p)) - level),
        "galois": abs(filtration_level(galois_act(t, p)) - level),
    }, [p.f, psi]


def _trial_stratum(rng, field):
    n = int(rng.integers(1, 7))
    k = int(rng.integers(1, min(4, n) + 1))
    m = int(rng.integers(0, 4))
    psi = random_isometry(rng, n, k, field)
    s = StratumCoords(psi, _random_coords(rng, field, k, m))
    p = stratum_reconstruct(s, n, m)
    dec = stratum_decompose(p, k)
    if not isinstance(dec, StratumCoords):
        return {"roundtrip": np.inf, "level": abs(filtration_level(p) - k), "subspace": np.inf}, [p.f]
    q = stratum_reconstruct(dec, n, m)
    proj = psi @ adjoint(psi) - dec.psi @ adjoint(dec.psi)
    return {
        "roundtrip": max_norm(q.f - p.f),
        "level": abs(filtration_level(p) - k),
        "subspace": max_norm(proj),
    }, [psi, s.coords.Y, s.coords.X]


def _trial_collapse(rng, field):
    k, m = int(rng.integers(1, 5)), int(rng.integers(0, 4))
    c = _random_coords(rng, field, k, m)
    Z = random_selfadjoint(rng, k, field)
    F = composite_F(c.Y, c.X, Z)
    pf = collapse_t(hom_decompose(F))
    target = cayley(c).f
    return {
        "transitivity": max(max_norm(pf.A - target), max_norm(pf.Z - Z)),
    }, [c.Y, c.X, Z]


def _trial_basepoint(rng, field):
    # a point of L(K^k, K^(k+m)) from a lower stratum, pushed through both collapse routes
    k, m = int(rng.integers(1, 5)), int(rng.integers(0, 4))
    j = int(rng.integers(0, k))
    psi = random_isometry(rng, k, j, field)
    p = stratum_reconstruct(StratumCoords(psi, _random_coords(rng, field, j, m)), k, m)
    Z = random_selfadjoint(rng, k, field)
    M = p.f @ exp_matrix(-Z)
    composite = collapse_t(hom_decompose(M))
    via_routes = composite is BASEPOINT or collapse_cflat(StiefelPoint(composite.A, k, m)) is BASEPOINT
    moved = vstack(p.f1 - identity(k, field), p.f2)
    direct = real_rank(moved, scale=1.0) < k
    return {"agreement": float(via_routes != direct) + float(not via_routes)}, [p.f, Z]


def _trial_zeta(rng, field):
    k = int(rng.integers(1, 5))
    zm = zeta(field, k)
    x = random_matrix(rng, k, 1, field)
    y = random_matrix(rng, k, 1, field)
    t = random_galois(rng, field)
    lhs = (zm.matrix @ KMatrix(field, galois_apply_array(t, x.data))).data[:, 0]
    rhs = extension_galois(t, (zm.matrix @ x).data[:, 0])
    pair = inner_product(zm(x), zm(y)) - inner_product(x, y)
    return {
        "isometry": max(pair.norm(), isometry_residual(zm.matrix)),
        "equivariance": float(np.max(np.abs(lhs - rhs))),
        "formula": float(np.max(np.abs(zeta_formula(field, x.data[:, 0]) - (zm.matrix @ x).data[:, 0]))),
    }, [x, y]


@dataclass(frozen=True)
class Suite:
    name: str
    trial: Callable
    tolerances: dict
    fields: tuple = ("R", "C", "H")


SUITES = (
    Suite("cayley-isometry", _trial_cayley_isometry, {"isometry": 1e-10, "h-crosscheck": 1e-10}),
    Suite("cayley-bijectivity", _trial_cayley_bijective,
          {"coords-roundtrip": 1e-8, "point-roundtrip": 1e-8, "skew": 1e-10}),
    Suite("spectral", _trial_spectral, {"reconstruction": 1e-9, "orthonormality": 1e-10, "oracle": 1e-8}),
    Suite("polar", _trial_polar, {"reassembly": 1e-8, "isometry": 1e-8, "selfadjoint": 1e-10}),
    Suite("filtration-invariance", _trial_filtration, {"generated-level": 0, "conjugation": 0, "galois": 0}),
    Suite("stratum-roundtrip", _trial_stratum, {"roundtrip": 1e-8, "level": 0, "subspace": 1e-8}),
    Suite("collapse-transitivity", _trial_collapse, {"transitivity": 1e-8}),
    Suite("collapse-basepoint", _trial_basepoint, {"agreement": 0}),
    Suite("zeta", _trial_zeta, {"isometry": 1e-12, "equivariance": 1e-12, "formula": 1e-12}, ("C", "H")),
)


def _suite_id(name: str) -> int:
    return zlib.crc32(name.encode())


def run_suite(suite: Suite, field, trials: int, seed: int = 0) -> list[VerifyReport]:
    """Run ``trials`` seeded trials; one report per metric of the suite."""
    field = Field.parse(field)
    sid = _suite_id(suite.name)
    maxima = {name: 0.0 for name in suite.tolerances}
    failures = {name: [] for name in suite.tolerances}
    for trial in range(trials):
        rng = np.random.default_rng([seed, sid, trial])
        metrics, inputs = suite.trial(rng, field)
        digest = None
        for name, tol in suite.tolerances.items():
            r = float(metrics[name])
            maxima[name] = max(maxima[name], r)
            if not r <= tol:
                digest = digest or _digest(inputs)
                failures[name].append({"seed": [seed, sid, trial], "digest": digest, "residual": r})
    return [
        VerifyReport(f"{suite.name}/{name}", field.value, trials, float(tol), maxima[name], failures[name])
        for name, tol in suite.tolerances.items()
    ]


def jacobian_reports(field) -> list[VerifyReport]:
    field = Field.parse(field)
    worst, failures = 0.0, []
    for k, m in JACOBIAN_SHAPES:
        dev = jacobian_origin_check(field, k, m, 1e-4)
        worst = max(worst, dev)
        if not dev < 5e-4:
            failures.append({"seed": None, "digest": f"k={k},m={m}", "residual": dev})
    return [VerifyReport("jacobian-origin", field.value, len(JACOBIAN_SHAPES), 5e-4, worst, failures)]


def series_reports(field, N: int = 120) -> list[VerifyReport]:
    field = Field.parse(field)
    equal, first = series_compare(field, N)
    failures = [] if equal else [{"seed": None, "digest": f"N={N}", "residual": float(first)}]
    return [VerifyReport("series-splitting", field.value, 1, 0.0, 0.0 if equal else 1.0, failures)]


def dimension_reports(field, k_max: int = 12) -> list[VerifyReport]:
    """Dimension count ``dim ad + dim sa = d k^2`` against an enumerated, rank-checked basis."""
    field = Field.parse(field)
    d = field.dim
    failures, worst = [], 0.0
    for k in range(k_max + 1):
        r = rep_dims(field, k)
        skew, selfadj = skew_basis(field, k), selfadjoint_basis(field, k)
        vecs = [B.data.reshape(-1) for B in skew + selfadj]
        enum_rank = int(np.linalg.matrix_rank(np.array(vecs))) if vecs else 0
        closure = all(max_norm(B + adjoint(B)) == 0 for B in skew) and all(
            max_norm(B - adjoint(B)) == 0 for B in selfadj
        )
        bad = (
            abs(r.dim_ad + r.dim_sa - d * k * k)
            + abs(len(skew) - r.dim_ad)
            + abs(len(selfadj) - r.dim_sa)
            + abs(enum_rank - d * k * k)
            + (0 if closure else 1)
        )
        worst = max(worst, float(bad))
        if bad:
            failures.append({"seed": None, "digest": f"k={k}", "residual": float(bad)})
    return [VerifyReport("dimension-ledger", field.value, k_max + 1, 0.0, worst, failures)]


def run_all(fields=("R", "C", "H"), trials: int = 500, seed: int = 0) -> list[VerifyReport]:
    reports: list[VerifyReport] = []
    for f in fields:
        f = Field.parse(f)
        for suite in SUITES:
            if f.value in suite.fields:
                reports.extend(run_suite(suite, f, trials, seed))
        reports.extend(jacobian_reports(f))
        reports.extend(series_reports(f))
        reports.extend(dimension_reports(f))
    return reports
