"""Randomized property suites behind `pnvc propcheck` and the acceptance
tests.

Every trial derives its own RNG from (seed, suite, trial index), so a
reported counterexample can be replayed standalone.  Suites return their
first counterexample with enough context (net text plus inputs) to rerun
the failing check.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

from . import deciders, logic, transform
from .bounds import BoundParams, BoundValue, cover_bound_closed
from .deciders import (
    COVERED, INCONCLUSIVE, UNBOUNDED,
    cover_backward, cover_forward_bounded, find_weak_pumping, karp_miller,
    make_pumping_decomposition, self_covering_search, sequence_effects,
    shortest_cover_len, strengthen_pumping,
)
from .generator import GenSpec, gen_net
from .net import NetError, PetriNet, fire_relaxed, fire_sequence, serialize_net
from .structure import (
    build_graph, classify_types, compute_varieties, decompose, le_pow2,
    min_vertex_cover, type_count_cap, variety_count_cap_exponent,
)
from .transform import transfer, truncate


@dataclass
class Counterexample:
    suite: str
    trial: int
    seed: int
    net_text: str
    inputs: dict
    message: str

    def to_json(self):
        return {"suite": self.suite, "trial": self.trial, "seed": self.seed,
                "net": self.net_text, "inputs": self.inputs,
                "message": self.message}


@dataclass
class SuiteReport:
    name: str
    trials: int
    passed: int
    failed: int
    skipped: int = 0
    first_counterexample: Optional[Counterexample] = None
    stats: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def to_json(self):
        return {
            "suite": self.name, "trials": self.trials, "passed": self.passed,
            "failed": self.failed, "skipped": self.skipped,
            "counterexample": (self.first_counterexample.to_json()
                               if self.first_counterexample else None),
            "stats": self.stats,
        }


def _trial_rng(seed: int, suite: str, trial: int) -> random.Random:
    return random.Random(f"pnvc:{seed}:{suite}:{trial}")


# ---------------------------------------------------------------------------
# mirrored nets: two places guaranteed to share a variety

@dataclass
class MirroredNet:
    net: PetriNet
    m0: tuple
    a: int  # first free place
    b: int  # its mirror
    adders: list  # transitions adding to a, strongest first
    removers: list  # transitions removing from a
    twin: dict  # a-transition -> its b-twin


def _build_mirrored(rng: random.Random, a_tokens: int, b_tokens: int) -> MirroredNet:
    k = rng.randint(0, 2)
    w_cap = rng.randint(1, 2)
    cover = [f"c{i + 1}" for i in range(k)]
    places = cover + ["a", "b"]
    a_idx, b_idx = k, k + 1

    specs = [("add", rng.randint(1, w_cap)), ("rem", rng.randint(1, w_cap))]
    if rng.random() < 0.5:
        specs.append((rng.choice(("add", "rem")), rng.randint(1, w_cap)))

    names: List[str] = []
    pre_cols: List[List[int]] = []
    post_cols: List[List[int]] = []

    def add_column(name, ins: dict, outs: dict):
        names.append(name)
        pre_cols.append([ins.get(p, 0) for p in range(len(places))])
        post_cols.append([outs.get(p, 0) for p in range(len(places))])

    for i, (kind, w) in enumerate(specs):
        # every base transition touches every cover place so the c-places are
        # the unique minimum cover
        ins, outs = {}, {}
        for c in range(k):
            mode = rng.choice(("in", "out", "both"))
            if mode in ("in", "both"):
                ins[c] = rng.randint(1, w_cap)
            if mode in ("out", "both"):
                outs[c] = rng.randint(1, w_cap)
        a_ins, a_outs = dict(ins), dict(outs)
        b_ins, b_outs = dict(ins), dict(outs)
        if kind == "add":
            a_outs[a_idx] = w
            b_outs[b_idx] = w
        else:
            a_ins[a_idx] = w
            b_ins[b_idx] = w
        add_column(f"u{i + 1}", a_ins, a_outs)
        add_column(f"v{i + 1}", b_ins, b_outs)

    pre = [[col[p] for col in pre_cols] for p in range(len(places))]
    post = [[col[p] for col in post_cols] for p in range(len(places))]
    net = PetriNet("mirrored", places, names, pre, post)
    m0 = tuple([300] * k + [a_tokens, b_tokens])

    adders, removers, twin = [], [], {}
    for i, (kind, _) in enumerate(specs):
        u, v = 2 * i, 2 * i + 1
        twin[u] = v
        twin[v] = u
        (adders if kind == "add" else removers).append(u)
    return MirroredNet(net, m0, a_idx, b_idx, adders, removers, twin)


# ---------------------------------------------------------------------------
# suite: truncation

def _trial_truncation(rng: random.Random, sabotage: bool = False):
    mir = _build_mirrored(rng, a_tokens=rng.randint(2, 4), b_tokens=rng.randint(0, 2))
    net, m0 = mir.net, mir.m0
    w = net.max_weight
    t_add = mir.adders[0]
    t_rem = mir.removers[0]
    wa = net.arc_delta(mir.a, t_add)
    wr = -net.arc_delta(mir.a, t_rem)
    threshold = w ** 2 + w ** 3
    n_add = -(-threshold // wa) + rng.randint(0, 5)
    n_rem = -(-(n_add * wa) // wr)
    if m0[mir.a] < wr:  # keep the descent overshoot nonnegative
        m0 = tuple(v if i != mir.a else wr + rng.randint(0, 2)
                   for i, v in enumerate(m0))

    seq: List[int] = []
    for _ in range(n_add):
        seq.append(t_add)
        if rng.random() < 0.25:
            seq.append(mir.twin[t_add])  # touches b only; keeps a's shape
    peak_pos = len(seq)
    for _ in range(n_rem):
        seq.append(t_rem)
        if rng.random() < 0.25:
            seq.append(mir.twin[t_add])

    _, chain = fire_sequence(net, m0, seq)
    vals = [mk[mir.a] for mk in chain]
    e = vals[0]
    idx1 = 0
    idx2 = vals.index(max(vals))
    idx3 = next(c for c in range(idx2 + 1, len(vals)) if vals[c] <= e)

    vc = min_vertex_cover(build_graph(net))
    decomp = decompose(net, vc)
    inputs = {"sequence": [net.transitions[t] for t in seq],
              "e": e, "idx1": idx1, "idx2": idx2, "idx3": idx3}

    positions, result = truncate(net, seq, mir.a, mir.b, e, idx1, idx2, idx3, decomp)
    sub_effect = sum(net.arc_delta(mir.a, seq[pos]) for pos in positions)
    if sub_effect != 0:
        return False, f"sub-word effect on a is {sub_effect}, not 0", inputs, net, m0
    _, chain2 = fire_sequence(net, m0, result.sequence)
    if chain2[idx2][mir.a] >= vals[idx2]:
        return False, "peak did not strictly decrease after transfer", inputs, net, m0
    if any(mk[mir.a] < 0 for mk in chain2):
        return False, "negative token count on a after transfer", inputs, net, m0
    return True, "", inputs, net, m0


# ---------------------------------------------------------------------------
# suite: transfer invariance

def _trial_transfer(rng: random.Random, sabotage: bool = False):
    mir = _build_mirrored(rng, a_tokens=rng.randint(2, 5), b_tokens=rng.randint(0, 3))
    net, m0 = mir.net, mir.m0
    vc = min_vertex_cover(build_graph(net))
    decomp = decompose(net, vc)

    seq: List[int] = []
    marking = m0
    for _ in range(rng.randint(5, 25)):
        enabled = [t for t in range(net.num_transitions) if net.enabled(marking, t)]
        if not enabled:
            break
        t = rng.choice(enabled)
        seq.append(t)
        out = list(marking)
        for p, d in net._delta[t]:
            out[p] += d
        marking = tuple(out)
    a_positions = [i for i, t in enumerate(seq) if net.touches(mir.a, t)]
    if not a_positions:
        return None  # nothing to transfer; skip the trial
    chosen = sorted(rng.sample(a_positions, rng.randint(1, len(a_positions))))
    inputs = {"sequence": [net.transitions[t] for t in seq],
              "positions": chosen}

    result = transfer(net, seq, chosen, mir.a, mir.b, decomp)
    out_seq = list(result.sequence)
    if sabotage and result.replaced:
        # self-test hook: swap in a wrong-effect twin; the invariants below
        # must then fail
        pos, old, _ = result.replaced[0]
        wrong_pool = [t for t in range(net.num_transitions)
                      if t != old and net.arc_delta(mir.b, t) != net.arc_delta(mir.a, old)]
        if wrong_pool:
            out_seq[pos] = wrong_pool[0]

    _, base_chain, _ = fire_relaxed(net, m0, seq, ())
    _, new_chain, _ = fire_relaxed(net, m0, out_seq, ())
    cover_set = set(vc.members)
    for step, (x, y) in enumerate(zip(base_chain, new_chain)):
        for p in cover_set:
            if x[p] != y[p]:
                return False, f"cover place {net.places[p]} diverges at step {step}", \
                    inputs, net, m0
    for p in range(net.num_places):
        if p in (mir.a, mir.b):
            continue
        if base_chain[-1][p] != new_chain[-1][p]:
            return False, f"final marking changed at {net.places[p]}", inputs, net, m0
    pair = (mir.a, mir.b)
    if sum(base_chain[-1][p] for p in pair) != sum(new_chain[-1][p] for p in pair):
        return False, "token sum over the transfer pair changed", inputs, net, m0
    if transform.is_safe_for_transfer(net, seq, chosen, mir.a):
        if any(mk[mir.b] < 0 for mk in new_chain):
            return False, "safe transfer drove the target place negative", \
                inputs, net, m0
    return True, "", inputs, net, m0


# ---------------------------------------------------------------------------
# suite: oracle agreement (+ structural caps piggyback)

def _small_spec(rng: random.Random) -> GenSpec:
    return GenSpec(
        places=rng.randint(1, 4),
        transitions=rng.randint(1, 5),
        max_weight=rng.randint(1, 2),
        max_initial=rng.randint(0, 2),
    )


def _caps_hold(net: PetriNet) -> Optional[str]:
    vc = min_vertex_cover(build_graph(net))
    types, assignment = classify_types(net, vc)
    varieties = compute_varieties(net, vc, types, assignment)
    if len(types) > type_count_cap(net.max_weight, vc.k):
        return f"{len(types)} types exceeds the cap"
    distinct = len(set(varieties.values()))
    # the per-net cap (over actual types) implies the parameter-only one
    if not le_pow2(distinct, 2 * net.max_weight * len(types)):
        return f"{distinct} varieties exceeds the per-type cap"
    if not le_pow2(distinct, variety_count_cap_exponent(net.max_weight, vc.k)):
        return f"{distinct} varieties exceeds the cap"
    decomp = decompose(net, vc)
    if not le_pow2(decomp.k_prime - vc.k,
                   variety_count_cap_exponent(net.max_weight, vc.k)):
        return "k' exceeds k plus the variety cap"
    return None


def _trial_oracle_agreement(rng: random.Random, sabotage: bool = False):
    net, m0 = gen_net(_small_spec(rng), rng.getrandbits(32))
    target = tuple(rng.randint(0, 2) for _ in range(net.num_places))
    inputs = {"target": list(target)}

    caps_msg = _caps_hold(net)
    if caps_msg:
        return False, f"structural cap violated: {caps_msg}", inputs, net, m0

    back = cover_backward(net, m0, target)
    fwd = cover_forward_bounded(net, m0, target)
    both = back.verdict != INCONCLUSIVE and fwd.verdict != INCONCLUSIVE
    extra = {"mutually_conclusive": both}
    if both and back.verdict != fwd.verdict:
        return False, f"backward={back.verdict} forward={fwd.verdict}", inputs, net, m0
    for res in (back, fwd):
        if res.verdict == COVERED:
            final, _ = fire_sequence(net, m0, res.witness)
            if not all(final[p] >= target[p] for p in range(net.num_places)):
                return False, f"{res.method} witness does not cover", inputs, net, m0
    return True, "", inputs, net, m0, extra


# ---------------------------------------------------------------------------
# suite: bound soundness

def _trial_bound_soundness(rng: random.Random, sabotage: bool = False):
    net, m0 = gen_net(_small_spec(rng), rng.getrandbits(32))
    target = tuple(rng.randint(0, 2) for _ in range(net.num_places))
    inputs = {"target": list(target)}
    back = cover_backward(net, m0, target)
    if back.verdict != COVERED:
        return None
    length = shortest_cover_len(net, m0, target, hard_cap=20)
    if length is None:
        return None  # witness longer than the oracle cap; not conclusive
    vc = min_vertex_cover(build_graph(net))
    decomp = decompose(net, vc)
    params = BoundParams(m=net.num_places, w=net.max_weight,
                         k_prime=decomp.k_prime, r=max(target))
    bound = cover_bound_closed(decomp.k_prime, params)
    inputs.update({"shortest": length, "bound_log2": bound.log2})
    if not BoundValue.of(length).le(bound):
        return False, f"witness length {length} exceeds the covering bound", \
            inputs, net, m0
    return True, "", inputs, net, m0


# ---------------------------------------------------------------------------
# suite: boundedness method agreement

def _trial_km_vs_scs(rng: random.Random, sabotage: bool = False):
    net, m0 = gen_net(_small_spec(rng), rng.getrandbits(32))
    inputs: dict = {}
    tree = karp_miller(net, m0)
    if not tree.complete:
        return None
    km_unbounded = any(n.accelerated for n in tree.nodes)
    witness, exhausted = self_covering_search(net, m0, max_len=10)
    if witness is None and not exhausted:
        return None  # explicit search inconclusive; nothing to compare
    scs_unbounded = witness is not None
    inputs = {"km": UNBOUNDED if km_unbounded else "bounded",
              "scs": UNBOUNDED if scs_unbounded else "bounded"}
    if km_unbounded != scs_unbounded:
        return False, "boundedness methods disagree", inputs, net, m0
    if witness is not None:
        seq, split = witness
        _, chain = fire_sequence(net, m0, seq)
        last = chain[-1]
        ok = all(last[p] >= chain[split][p] for p in range(net.num_places)) \
            and last != chain[split]
        if not ok:
            return False, "self-covering witness does not replay", inputs, net, m0
    return True, "", inputs, net, m0


# ---------------------------------------------------------------------------
# suite: boundedness-atom crosscheck

def _tiny_spec(rng: random.Random) -> GenSpec:
    return GenSpec(
        places=rng.randint(2, 3),
        transitions=rng.randint(1, 3),
        max_weight=1,
        max_initial=1,
        pump_bias=0.5,
    )


def weak_pumpable_unions(net: PetriNet, m0, max_len: int):
    """All maximal place sets jointly pumpable by one weakly enabled
    sequence of length <= max_len (exhaustive over words and splits)."""
    unions = set()
    n = net.num_transitions
    if n == 0:
        return unions

    def words(length):
        word = [0] * length
        while True:
            yield tuple(word)
            i = length - 1
            while i >= 0 and word[i] == n - 1:
                word[i] = 0
                i -= 1
            if i < 0:
                return
            word[i] += 1

    for length in range(1, max_len + 1):
        for word in words(length):
            for bounds_list in deciders._decompositions(length, net.num_places):
                segments = []
                prev = 0
                for bb, ee in bounds_list:
                    segments.append((word[prev:bb], word[bb:ee]))
                    prev = ee
                dec = make_pumping_decomposition(net, segments, frozenset())
                pumped = frozenset().union(*dec.pumped_sets) if dec.pumped_sets \
                    else frozenset()
                if not pumped or pumped in unions:
                    continue
                dec = make_pumping_decomposition(net, segments, pumped)
                if deciders.check_weak_conditions(net, m0, dec) is None:
                    unions.add(pumped)
    # keep maximal sets only; subsets are pumpable via the same witness
    return {u for u in unions if not any(u < v for v in unions)}


def _hitting_sets(terms, num_places):
    """Minimal candidate place sets touching every term with coefficient >= 1."""
    supports = [frozenset(p for p in range(num_places) if t.coeffs[p] >= 1)
                for t in terms]
    out = {frozenset()}
    for sup in supports:
        out = {x | {p} for x in out for p in sup}
    minimal = set()
    for x in out:
        if not any(y < x for y in out):
            minimal.add(x)
    return minimal


def _trial_beta_crosscheck(rng: random.Random, sabotage: bool = False):
    net, m0 = gen_net(_tiny_spec(rng), rng.getrandbits(32))
    tree = karp_miller(net, m0)
    if not tree.complete:
        return None
    num_terms = rng.randint(1, 2)
    terms = []
    for _ in range(num_terms):
        support = rng.sample(range(net.num_places),
                             rng.randint(1, net.num_places))
        coeffs = [1 if p in support else 0 for p in range(net.num_places)]
        terms.append(logic.Term(tuple(coeffs)))
    atom = logic.OmegaAtom(tuple(terms))
    inputs = {"terms": [t.coeffs for t in terms]}

    verdict = logic.check_beta(net, m0, atom)
    unions = weak_pumpable_unions(net, m0, max_len=5)
    found = any(
        any(x <= u for u in unions)
        for x in _hitting_sets(terms, net.num_places))
    inputs.update({"verdict": logic.verdict_name(verdict), "search_found": found})
    if verdict is None:
        return None
    if verdict == found:
        # atom true means no unbounded hitting set may exist, and vice versa
        return False, "atom verdict contradicts the pumping search", inputs, net, m0
    return True, "", inputs, net, m0


# ---------------------------------------------------------------------------
# pumping strengthening (used by the acceptance suite)

def pumped_suffix_effects(net: PetriNet, dec, reps):
    """Per place in dec.x: total effect of the strengthened sequence from the
    start of the first block that pumps it through the end."""
    out = {}
    segment_effects = [sequence_effects(net, pump) for _, pump in dec.segments]
    for p in dec.x:
        first = next(lam for lam, eff in enumerate(segment_effects) if eff[p] > 0)
        total = 0
        for lam in range(first, dec.alpha):
            gap, pump = dec.segments[lam]
            gap_eff = sequence_effects(net, gap)[p] if lam > first else 0
            total += gap_eff + segment_effects[lam][p] * reps[lam]
        out[p] = total
    return out


def _trial_pump_strengthen(rng: random.Random, sabotage: bool = False):
    net, m0 = gen_net(_tiny_spec(rng), rng.getrandbits(32))
    checked = 0
    for p in range(net.num_places):
        dec = find_weak_pumping(net, m0, {p}, max_len=4, alpha_max=2)
        if dec is None:
            continue
        checked += 1
        inputs = {"x": [net.places[p]],
                  "segments": [[list(g), list(u)] for g, u in dec.segments]}
        strengthened = strengthen_pumping(net, m0, dec)
        try:
            _, chain = fire_sequence(net, m0, strengthened)
        except NetError as exc:
            return False, f"strengthened sequence not enabled: {exc}", inputs, net, m0
        # recover the repetition counts to check the pumped suffix directly
        alpha = dec.alpha
        total = len(dec.sequence())
        w = net.max_weight
        reps = [0] * alpha
        reps[alpha - 1] = 1
        for lam in range(alpha - 2, -1, -1):
            later = sum((total - 1) * w * reps[mu] for mu in range(lam + 1, alpha))
            reps[lam] = (alpha - 1 - lam) * (total - 1) * w + later
        suffix = pumped_suffix_effects(net, dec, reps)
        if any(v <= 0 for v in suffix.values()):
            return False, "an x place is not pumped by the suffix", inputs, net, m0
    if checked == 0:
        return None
    return True, "", {"checked": checked}, net, m0


# ---------------------------------------------------------------------------
# harness

_TRIALS: Dict[str, Callable] = {
    "truncation": _trial_truncation,
    "transfer": _trial_transfer,
    "oracle-agreement": _trial_oracle_agreement,
    "bound-soundness": _trial_bound_soundness,
    "km-vs-scs": _trial_km_vs_scs,
    "beta-crosscheck": _trial_beta_crosscheck,
    "pump-strengthen": _trial_pump_strengthen,
}

SUITE_NAMES = ("truncation", "transfer", "oracle-agreement", "bound-soundness",
               "km-vs-scs", "beta-crosscheck")


def run_suite(name: str, trials: int, seed: int, sabotage: bool = False
              ) -> SuiteReport:
    if name not in _TRIALS:
        raise ValueError(f"unknown suite {name!r}; known: {sorted(_TRIALS)}")
    fn = _TRIALS[name]
    report = SuiteReport(name, trials, 0, 0)
    extra_totals: Dict[str, int] = {}
    produced = 0
    attempt = 0
    # some trials are vacuous (nothing to check); keep drawing fresh ones so
    # `trials` counts real checks, with a generous attempt budget
    while produced < trials and attempt < trials * 30 + 50:
        rng = _trial_rng(seed, name, attempt)
        attempt += 1
        try:
            outcome = fn(rng, sabotage=sabotage)
        except Exception as exc:  # a crash is a counterexample too
            outcome = (False, f"trial crashed: {exc!r}", {}, None, None)
        if outcome is None:
            report.skipped += 1
            continue
        ok, message, inputs, net, m0 = outcome[:5]
        if len(outcome) > 5:
            for key, val in outcome[5].items():
                extra_totals[key] = extra_totals.get(key, 0) + int(val)
        produced += 1
        if ok:
            report.passed += 1
        else:
            report.failed += 1
            if report.first_counterexample is None:
                text = serialize_net(net, m0) if net is not None else ""
                report.first_counterexample = Counterexample(
                    name, attempt - 1, seed, text, inputs, message)
    report.stats.update(extra_totals)
    report.stats["attempts"] = attempt
    return report


def propcheck(suites, trials: int, seed: int, sabotage: bool = False) -> dict:
    reports = [run_suite(name, trials, seed, sabotage=sabotage)
               for name in (suites or SUITE_NAMES)]
    return {
        "seed": seed,
        "trials": trials,
        "suites": [r.to_json() for r in reports],
        "ok": all(r.ok for r in reports),
    }


def replay_counterexample(cx: dict, sabotage: bool = False) -> bool:
    """Rerun a reported counterexample; True when it fails again."""
    fn = _TRIALS[cx["suite"]]
    rng = _trial_rng(cx["seed"], cx["suite"], cx["trial"])
    try:
        outcome = fn(rng, sabotage=sabotage)
    except Exception:
        return True
    return outcome is not None and outcome[0] is False
