"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``; the lines are printed
even when pytest captures output.
"""
import io
import json
import time

import pytest

from kstiefel import cli
from kstiefel.verify import (
    JACOBIAN_SHAPES,
    SUITES,
    dimension_reports,
    jacobian_reports,
    run_suite,
    series_reports,
)

SUITE = {s.name: s for s in SUITES}
ALL = ("R", "C", "H")


def _run(name, fields, trials):
    reports = []
    for f in fields:
        reports.extend(run_suite(SUITE[name], f, trials, seed=0))
    return reports


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def _report(capsys, label, reports, elapsed, limit):
    worst = {}
    for r in reports:
        key = r.suite
        worst[key] = max(worst.get(key, 0.0), r.max_residual)
    failures = sum(len(r.failures) for r in reports)
    ok = failures == 0 and elapsed < limit
    detail = ", ".join(f"{k}={v:.2e}" for k, v in worst.items())
    line = f"[{'PASS' if ok else 'FAIL'}] {label}: {failures} failures; {detail}; {elapsed:.2f}s (limit {limit:g}s)"
    with capsys.disabled():
        print("\n" + line)
    return ok, line


def test_c01_cayley_isometry(capsys):
    reports, dt = _timed(lambda: _run("cayley-isometry", ALL, 1000))
    ok, line = _report(capsys, "C1 Cayley isometry (1000/field, tol 1e-10)", reports, dt, 5.0)
    assert all(r.tolerance <= 1e-10 for r in reports)
    assert ok, line


def test_c02_cayley_bijectivity(capsys):
    reports, dt = _timed(lambda: _run("cayley-bijectivity", ALL, 1000))
    ok, line = _report(capsys, "C2 Cayley bijectivity (1000/field, tol 1e-8)", reports, dt, 5.0)
    assert ok, line


def test_c03_spectral_theorem_over_H(capsys):
    reports, dt = _timed(lambda: _run("spectral", ("H",), 500))
    ok, line = _report(capsys, "C3 spectral theorem over H (500, k<=8)", reports, dt, 30.0)
    tol = {r.suite.split("/")[1]: r.tolerance for r in reports}
    assert tol == {"reconstruction": 1e-9, "orthonormality": 1e-10, "oracle": 1e-8}
    assert ok, line


def test_c04_polar_factorization(capsys):
    reports, dt = _timed(lambda: _run("polar", ALL, 500))
    ok, line = _report(capsys, "C4 polar factorization (500/field, k<=5)", reports, dt, 10.0)
    assert ok, line


def test_c05_differential_at_origin(capsys):
    assert JACOBIAN_SHAPES == ((1, 0), (2, 1), (2, 2), (3, 1))
    reports, dt = _timed(lambda: [r for f in ALL for r in jacobian_reports(f)])
    ok, line = _report(capsys, "C5 differential at origin (h=1e-4, tol 5e-4)", reports, dt, 20.0)
    assert ok, line


def test_c06_filtration_invariance(capsys):
    reports, dt = _timed(lambda: _run("filtration-invariance", ALL, 200))
    ok, line = _report(capsys, "C6 filtration invariance (200/field, exact)", reports, dt, 10.0)
    assert all(r.tolerance == 0 for r in reports)
    assert ok, line


def test_c07_stratum_roundtrip(capsys):
    reports, dt = _timed(lambda: _run("stratum-roundtrip", ALL, 500))
    ok, line = _report(capsys, "C7 stratum round trip (500/field, k<=4, n<=6, m<=3)", reports, dt, 30.0)
    assert ok, line


def test_c08_collapse_transitivity(capsys):
    def both():
        return _run("collapse-transitivity", ALL, 500) + _run("collapse-basepoint", ALL, 100)

    reports, dt = _timed(both)
    ok, line = _report(capsys, "C8 collapse transitivity (500/field) + basepoint loci (100/field)", reports, dt, 10.0)
    assert ok, line


def test_c09_zeta(capsys):
    reports, dt = _timed(lambda: _run("zeta", ("C", "H"), 200))
    ok, line = _report(capsys, "C9 zeta isometry/equivariance (200, C and H, k<=4)", reports, dt, 2.0)
    assert all(r.tolerance <= 1e-12 for r in reports)
    assert ok, line


def test_c10_splitting_shadow(capsys):
    reports, dt = _timed(lambda: [r for f in ALL for r in series_reports(f, 120)])
    ok, line = _report(capsys, "C10 splitting shadow (N=120, exact)", reports, dt, 1.0)
    assert ok, line


def test_c11_dimension_ledger(capsys):
    reports, dt = _timed(lambda: [r for f in ALL for r in dimension_reports(f, 12)])
    ok, line = _report(capsys, "C11 dimension ledger (k<=12, basis enumeration)", reports, dt, 1.0)
    assert ok, line


@pytest.mark.slow
def test_full_verify_run(capsys):
    out, err = io.StringIO(), io.StringIO()
    code, dt = _timed(lambda: cli.run(["verify"], io.StringIO(""), out, err))
    report = json.loads(out.getvalue())
    ok = code == 0 and report["passed"] and dt < 120.0
    line = f"[{'PASS' if ok else 'FAIL'}] full verify suite (500 trials): exit {code}; {dt:.1f}s (limit 120s)"
    with capsys.disabled():
        print("\n" + line)
    assert ok, line
