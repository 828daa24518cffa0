"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines; every tolerance and sample size is pinned here.
"""

import itertools
import math
import time
from contextlib import contextmanager

import pytest

from pnvc.bounds import BoundParams, BoundValue, cover_bound_closed, cover_bound_rec
from pnvc.deciders import (
    COVERED, INCONCLUSIVE, NOT_COVERED, UNBOUNDED,
    cover_backward, cover_forward_bounded, is_bounded, karp_miller,
    self_covering_search, shortest_cover_len,
)
from pnvc.generator import GenSpec, gen_net
from pnvc.logic import check_phi, parse_formula, verdict_name
from pnvc.net import fire_sequence
from pnvc.properties import _small_spec, _trial_rng, run_suite
from pnvc.structure import (
    build_graph, classify_types, compute_varieties, decompose, le_pow2,
    min_vertex_cover, type_count_cap, variety_count_cap_exponent,
)
from pnvc.transform import transfer


@contextmanager
def criterion(number, name, budget_s):
    start = time.monotonic()
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {number:>2} {name}: FAIL")
        raise
    elapsed = time.monotonic() - start
    status = "PASS" if elapsed <= budget_s else "FAIL (over time budget)"
    print(f"ACCEPTANCE {number:>2} {name}: {status} [{elapsed:.2f}s <= {budget_s}s]")
    assert elapsed <= budget_s, f"runtime {elapsed:.2f}s exceeds {budget_s}s"


@pytest.fixture(scope="module")
def sample_200():
    """The 200 seeded instances shared by criteria 3, 4, and 7."""
    out = []
    for trial in range(200):
        rng = _trial_rng(20260808, "acceptance-oracle", trial)
        net, m0 = gen_net(_small_spec(rng), rng.getrandbits(32))
        target = tuple(rng.randint(0, 2) for _ in range(net.num_places))
        out.append((net, m0, target))
    return out


def test_criterion_1_fixture_net_a(net_a):
    with criterion(1, "fixture net A verdicts", 1.0):
        net, m0 = net_a
        back = cover_backward(net, m0, (1, 1, 0))
        fwd = cover_forward_bounded(net, m0, (1, 1, 0))
        assert back.verdict == NOT_COVERED and fwd.verdict == NOT_COVERED

        back = cover_backward(net, m0, (0, 0, 1))
        fwd = cover_forward_bounded(net, m0, (0, 0, 1))
        assert back.verdict == COVERED and fwd.verdict == COVERED
        assert [net.transitions[t] for t in back.witness] == ["t1"]
        assert [net.transitions[t] for t in fwd.witness] == ["t1"]

        km = is_bounded(net, m0, method="karp-miller")
        scs = is_bounded(net, m0, method="self-covering")
        assert km.verdict == UNBOUNDED and scs.verdict == UNBOUNDED
        assert scs.evidence["self_covering"] == ["t1", "t2"]


def test_criterion_2_fixture_net_b(net_b):
    with criterion(2, "fixture net B structure", 1.0):
        net, _ = net_b
        vc = min_vertex_cover(build_graph(net))
        types, assignment = classify_types(net, vc)
        t = net.transition_index
        assert assignment[t["t1"]] == assignment[t["t5"]]
        varieties = compute_varieties(net, vc, types, assignment)
        p = net.place_index
        assert varieties[p["p5"]] == varieties[p["p6"]]
        decomp = decompose(net, vc)
        res = transfer(net, [t["t1"]], [0], p["p5"], p["p6"], decomp)
        assert [net.transitions[x] for x in res.sequence] == ["t5"]


def test_criterion_3_oracle_agreement(sample_200):
    with criterion(3, "oracle agreement on 200 nets", 60.0):
        conclusive = 0
        for net, m0, target in sample_200:
            back = cover_backward(net, m0, target)
            fwd = cover_forward_bounded(net, m0, target)
            if INCONCLUSIVE not in (back.verdict, fwd.verdict):
                conclusive += 1
                assert back.verdict == fwd.verdict, \
                    f"disagreement on {net.name}: {back.verdict} vs {fwd.verdict}"
        assert conclusive >= 0.95 * len(sample_200), \
            f"only {conclusive}/200 mutually conclusive"


def test_criterion_4_bound_soundness(sample_200):
    with criterion(4, "witness lengths below the covering bound", 60.0):
        yes = 0
        for net, m0, target in sample_200:
            if cover_backward(net, m0, target).verdict != COVERED:
                continue
            yes += 1
            length = None
            for cap in (12, 20, 30):
                length = shortest_cover_len(net, m0, target, hard_cap=cap)
                if length is not None:
                    break
            assert length is not None, f"oracle found no witness on {net.name}"
            decomp = decompose(net, min_vertex_cover(build_graph(net)))
            params = BoundParams(m=net.num_places, w=net.max_weight,
                                 k_prime=decomp.k_prime, r=max(target))
            bound = cover_bound_closed(decomp.k_prime, params)
            assert BoundValue.of(length).le(bound), \
                f"length {length} beats the bound on {net.name}"
        assert yes > 0


def test_criterion_5_truncation_suite():
    with criterion(5, "truncation conclusions on 500 instances", 60.0):
        report = run_suite("truncation", 500, seed=20260808)
        assert report.passed == 500 and report.failed == 0, \
            report.first_counterexample and report.first_counterexample.message


def test_criterion_6_transfer_invariance():
    with criterion(6, "transfer invariance on 500 transfers", 60.0):
        report = run_suite("transfer", 500, seed=20260808)
        assert report.passed == 500 and report.failed == 0, \
            report.first_counterexample and report.first_counterexample.message


def test_criterion_7_structural_caps(sample_200):
    with criterion(7, "type/variety count caps", 60.0):
        for net, _, _ in sample_200:
            vc = min_vertex_cover(build_graph(net))
            types, assignment = classify_types(net, vc)
            assert len(types) <= type_count_cap(net.max_weight, vc.k)
            varieties = compute_varieties(net, vc, types, assignment)
            distinct = len(set(varieties.values()))
            assert le_pow2(distinct,
                           variety_count_cap_exponent(net.max_weight, vc.k))


def test_criterion_8_recurrence_vs_closed_form():
    with criterion(8, "recurrence below closed form on the grid", 10.0):
        for m, w, r, k_prime in itertools.product(range(1, 5), repeat=4):
            p = BoundParams(m=m, w=w, k_prime=k_prime, r=r)
            for i in range(0, 4):
                rec = cover_bound_rec(i, p)
                closed = cover_bound_closed(i, p)
                assert rec.exact is not None and closed.exact is not None
                assert rec.exact <= closed.exact, (m, w, r, k_prime, i)


def test_criterion_9_boundedness_agreement():
    with criterion(9, "boundedness method agreement on 200 nets", 60.0):
        report = run_suite("km-vs-scs", 200, seed=20260808)
        assert report.passed == 200 and report.failed == 0, \
            report.first_counterexample and report.first_counterexample.message


def test_criterion_10_logic_reproduction(net_a):
    with criterion(10, "logic fixture verdicts", 5.0):
        net, m0 = net_a
        cases = [
            ("EF(p1>=1 && p2>=1)", "false"),
            ("{p1+p2+p3} < omega", "false"),
            ("EF(p3>=4)", "true"),
            ("{p1+p2} < omega", "true"),
        ]
        for text, want in cases:
            got = verdict_name(check_phi(net, m0, parse_formula(text, net)))
            assert got == want, f"{text}: {got} != {want}"


def test_criterion_11_pumping_strengthening():
    with criterion(11, "strengthened pumping replays on 100 nets", 120.0):
        report = run_suite("pump-strengthen", 100, seed=20260808)
        assert report.passed == 100 and report.failed == 0, \
            report.first_counterexample and report.first_counterexample.message


def test_criterion_12_beta_atom_crosscheck():
    with criterion(12, "boundedness atoms vs pumping search on 50 nets", 120.0):
        report = run_suite("beta-crosscheck", 50, seed=20260808)
        assert report.passed == 50 and report.failed == 0, \
            report.first_counterexample and report.first_counterexample.message
