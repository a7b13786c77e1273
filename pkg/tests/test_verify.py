import numpy as np
import pytest

from kstiefel.algebra import Field
from kstiefel.verify import SUITES, Suite, VerifyReport, random_galois, run_all, run_suite


def _noisy_trial(rng, field):
    x = float(rng.random())
    return {"value": x}, [np.array([x])]


NOISY = Suite("noisy", _noisy_trial, {"value": 0.5})


def test_failures_empty_iff_max_residual_within_tolerance():
    for suite in SUITES[:3]:
        for r in run_suite(suite, Field.C, 5, seed=1):
            assert (not r.failures) == (r.max_residual <= r.tolerance)
    (r,) = run_suite(NOISY, Field.R, 40, seed=0)
    assert r.failures and r.max_residual > r.tolerance and not r.passed


def test_failures_can_be_replayed_from_their_seed():
    (r,) = run_suite(NOISY, Field.R, 40, seed=3)
    for f in r.failures:
        replay = _noisy_trial(np.random.default_rng(f["seed"]), Field.R)[0]["value"]
        assert replay == f["residual"]
        assert len(f["digest"]) == 16


def test_reports_are_deterministic_and_seed_dependent():
    a = [r.to_json() for r in run_suite(SUITES[0], Field.H, 4, seed=9)]
    b = [r.to_json() for r in run_suite(SUITES[0], Field.H, 4, seed=9)]
    c = [r.to_json() for r in run_suite(SUITES[0], Field.H, 4, seed=10)]
    assert a == b and a != c


def test_run_all_covers_every_suite():
    reports = run_all(["C"], trials=2, seed=0)
    names = {r.suite.split("/")[0] for r in reports}
    assert {s.name for s in SUITES} | {"jacobian-origin", "series-splitting", "dimension-ledger"} == names
    assert all(isinstance(r, VerifyReport) and r.passed for r in reports)


@pytest.mark.parametrize("field", [Field.R, Field.C, Field.H], ids=["R", "C", "H"])
def test_random_galois_is_valid(field):
    rng = np.random.default_rng(0)
    t = random_galois(rng, field)
    assert t.field is field
