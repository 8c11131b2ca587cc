"""Acceptance criteria A1-A12, one test each, each printing a PASS/FAIL line."""

import time

import pytest

from unitals import acceptance

SEED = acceptance.DEFAULT_SEED

LIMITS = {"A1": 60, "A2": 60, "A3": 30, "A4": 120, "A5": 120, "A6": 120, "A7": 30,
          "A8": 600, "A9": 900, "A10": 30, "A11": 60, "A12": 1800}


def _run(cid, capsys):
    t0 = time.perf_counter()
    if cid == "A12":
        ok, details = acceptance.a12(SEED, 1)
    else:
        ok, details = acceptance.CRITERIA[cid](SEED, 1)
    elapsed = time.perf_counter() - t0
    within = elapsed < LIMITS[cid]
    with capsys.disabled():
        print(f"\n{cid}: {'PASS' if ok and within else 'FAIL'} ({elapsed:.1f}s, limit {LIMITS[cid]}s)")
    return ok, details, within


@pytest.mark.parametrize("cid", acceptance.ALL_IDS)
def test_criterion(cid, capsys):
    ok, details, within = _run(cid, capsys)
    assert ok, details
    assert within, f"{cid} exceeded {LIMITS[cid]}s"


def test_a9_details_consistent():
    ok, d = acceptance.a9(SEED, 1)
    assert ok
    assert d["certificates"] >= 1 and d["embeddings"] == 2
    assert not d["fallback"] and d["reduction"]["two_transitive"]
    assert all(v["standard"] and v["disjointness_failures"] == 0 for v in d["verdicts"])


def test_law_predicts():
    assert acceptance.law_predicts(2, 8) and acceptance.law_predicts(2, 2)
    assert not acceptance.law_predicts(2, 4) and not acceptance.law_predicts(4, 8)
    assert acceptance.law_predicts(3, 27) and not acceptance.law_predicts(3, 81)
    assert not acceptance.law_predicts(5, 7)


def test_suite_summary_filtering():
    s = acceptance.run_suite(["A3", "A10"], seed=5)
    assert list(s["criteria"]) == ["A3", "A10"] and s["passed"] and s["seed"] == 5
    with pytest.raises(ValueError):
        acceptance.run_suite(["A99"])
