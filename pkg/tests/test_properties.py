import json

import pytest

from pnvc.properties import (
    SUITE_NAMES, propcheck, replay_counterexample, run_suite,
)


def test_all_suite_names_run_small():
    report = propcheck(None, trials=3, seed=5)
    assert {s["suite"] for s in report["suites"]} == set(SUITE_NAMES)
    assert report["ok"]


def test_zero_trials_vacuous_pass():
    report = run_suite("truncation", 0, seed=1)
    assert report.passed == 0 and report.failed == 0 and report.ok


def test_reports_are_deterministic():
    a = json.dumps(propcheck(["transfer"], 5, seed=9), sort_keys=True)
    b = json.dumps(propcheck(["transfer"], 5, seed=9), sort_keys=True)
    assert a == b


def test_unknown_suite_rejected():
    with pytest.raises(ValueError, match="unknown suite"):
        run_suite("nope", 1, seed=0)


def test_sabotage_mode_fails_and_replays():
    # the harness must catch a deliberately corrupted transfer
    report = run_suite("transfer", 25, seed=3, sabotage=True)
    assert report.failed > 0
    cx = report.first_counterexample
    assert cx is not None and cx.net_text
    assert replay_counterexample(cx.to_json(), sabotage=True)
    # and the same trials pass uncorrupted
    assert run_suite("transfer", 25, seed=3).failed == 0
