import json
import os
from pathlib import Path

import pytest

import splitsim

DATA = Path(os.environ.get("SPLITSIM_TEST_DATA", Path(__file__).resolve().parents[1] / "data"))


def load(name):
    return json.loads((DATA / name).read_text())


def test_pairing():
    assert splitsim.pair(1, 2) == 8
    assert splitsim.unpair(7) == (2, 1)


def test_run_matches_golden_trace():
    out = splitsim.run(load("anti_delta.json"))
    assert out["passed"] and out["settled"] and not out["aborted"]
    assert out["trace"] == (DATA / "anti_delta.trace").read_text()
    statuses = {c["id"]: c["status"] for c in out["report"]["checks"]}
    assert statuses["V5"] == "pass"


def test_verify_and_corrupt():
    sc = load("robinson_rich.json")
    trace = splitsim.run(sc)["trace"]
    assert splitsim.verify(sc, trace)["passed"]
    bad = splitsim.corrupt(sc, trace, "V7")
    report = splitsim.verify(sc, bad)["report"]
    assert not splitsim.verify(sc, bad)["passed"]
    assert [c["status"] for c in report["checks"] if c["id"] == "V7"] == ["fail"]


def test_validation_error():
    with pytest.raises(splitsim.ValidationError):
        splitsim.run({"horizon": 1, "construction": "sacks"})
    with pytest.raises(ValueError):
        splitsim.verify(load("anti_delta.json"), "stage=0\tkind=warp\n")


def test_fuzz_is_deterministic():
    a = splitsim.generate_scenario(5, 3, "robinson", 64)
    assert a == splitsim.generate_scenario(5, 3, "robinson", 64)
    assert splitsim.normalize_scenario(a) == a
    summary = splitsim.fuzz(5, 10, "sacks", 64)
    assert summary["failed"] == 0 and summary["first_failure"] is None


def test_omega_ce():
    flips = [[]] * 5 + [[3, 7]]
    assert splitsim.change_set(10, flips, [3] * 6) == [(3, splitsim.pair(5, 0)), (7, splitsim.pair(5, 1))]
    assert splitsim.restrict_to(10, flips, [3] * 6, 6) == []
    assert splitsim.limit_eval(10, [[3]], [2], 0) == 1
    with pytest.raises(splitsim.ApproxError):
        splitsim.limit_eval(10, [[3]], [1], 0)


def test_explain():
    lines = splitsim.explain((DATA / "anti_delta.trace").read_text(), requirement="P:0")
    assert len(lines) == 3 and "diagonalize" in lines[-1]
