import json

import pytest

from vimod.errors import DomainError
from vimod.verify import SUITES, Params, SuiteReport, restriction_regularity, run_suite, two_axis_bound
from vimod.vmod import Context, free_presentation, point_module


SMALL = {
    "shift-free": Params(q=3, n=(1,), window=3),
    "modified-shift-free": Params(q=2, m=2, n=(1, 1), window=3),
    "d-of-free": Params(q=3, n=(1,), window=3),
    "euler": Params(q=3, m=1, seed=1, count=3, window=3),
    "commute": Params(q=2, m=2, seed=1, window=3, count=1),
    "reduce": Params(q=3, n=(1,), window=2),
    "shift-theorem": Params(q=2, m=1, d=0, r=1, window=4, count=1),
    "main-bound": Params(q=2, m=1, d=1, r=1, window=4, count=3),
}


@pytest.mark.parametrize("name", SUITES)
def test_each_suite_passes_and_its_control_fails(name):
    rep = run_suite(name, SMALL[name])
    assert rep.passed, rep.counterexamples
    assert rep.checks > 0
    assert rep.control["failed_as_designed"] and rep.control["failures"]
    doc = json.loads(rep.to_json())
    assert doc["prng"] == "MT19937" and doc["status"] == "PASS" and doc["suite"] == name


def test_report_logic():
    rep = SuiteReport("x", {}, 0, control={"failed_as_designed": True})
    assert rep.passed
    rep.fail(reason="boom")
    assert not rep.passed and "1 counterexample" in rep.summary()
    vacuous = SuiteReport("x", {}, 0, control={"failed_as_designed": False})
    assert not vacuous.passed and "DID NOT FAIL" in vacuous.summary()


def test_seed_changes_random_suites():
    a = run_suite("euler", Params(q=2, seed=1, count=4)).to_json()
    b = run_suite("euler", Params(q=2, seed=2, count=4)).to_json()
    assert a != b and a == run_suite("euler", Params(q=2, seed=1, count=4)).to_json()


def test_main_bound_records_redraws():
    rep = run_suite("main-bound", Params(q=2, m=1, d=1, r=1, window=4, seed=0, count=4))
    assert rep.instances == 4
    assert rep.details["zero_modules_redrawn"] >= 0
    assert all(row["d"] <= 1 and row["r"] <= 1 for row in rep.details["observations"])


def test_restriction_regularities():
    ctx = Context(2, 2, window=4)
    assert restriction_regularity(point_module(2, 2), ctx, 0) == 0
    assert restriction_regularity(free_presentation([(1, 1)]), ctx, 0) == 1
    out = two_axis_bound(point_module(2, 2), ctx)
    assert (out["alpha"], out["beta"]) == (0, 0) and out["ok"]
    assert [r["bound"] for r in out["rows"]] == [0, 2, 4]
    out = two_axis_bound(free_presentation([(1, 1)]), ctx)
    assert (out["alpha"], out["beta"]) == (1, 1) and out["ok"]
    with pytest.raises(DomainError):
        restriction_regularity(point_module(2), Context(2, 1, window=3), 0)


def test_bad_requests():
    with pytest.raises(DomainError):
        run_suite("unknown", Params())
    with pytest.raises(DomainError):
        run_suite("commute", Params(m=1))
    with pytest.raises(DomainError):
        run_suite("shift-free", Params(m=2, n=(1, 1, 1)))
