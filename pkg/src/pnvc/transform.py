"""Firing-sequence surgery between same-variety places.

A sub-word of occurrences touching one place can be transferred to another
place of the same variety by swapping each transition for a same-type twin.
The truncation procedure picks a zero-effect sub-word around a token peak
whose transfer lowers the peak without driving anything negative;
``reduce_peaks`` iterates it until every independent place stays under a cap.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

from .net import NetError, PetriNet
from .structure import Decomposition


class PositionWithoutArc(NetError):
    """A sub-word position holds a transition with no arc to the pivot place."""


class VarietyMismatch(NetError):
    pass


class ArcMissing(NetError):
    """No same-type transition carries the required weight on the target place."""


class HypothesesUnmet(NetError):
    def __init__(self, which: str):
        super().__init__(f"truncation hypothesis not met: {which}")
        self.which = which


@dataclass(frozen=True)
class TransferResult:
    sequence: tuple  # same length as the host sequence
    replaced: tuple  # (position, old transition, new transition)


def _check_subword(positions: Sequence[int], length: int):
    prev = -1
    for pos in positions:
        if pos <= prev or pos < 0 or pos >= length:
            raise NetError("sub-word positions must be strictly increasing and in range")
        prev = pos


def is_safe_for_transfer(net: PetriNet, seq: Sequence[int],
                         positions: Sequence[int], p: int) -> bool:
    """True iff every prefix of the sub-word has cumulative effect >= 0 on p."""
    _check_subword(positions, len(seq))
    running = 0
    for pos in positions:
        t = seq[pos]
        if not net.touches(p, t):
            raise PositionWithoutArc(
                f"transition {net.transitions[t]} at position {pos} has no arc "
                f"to/from {net.places[p]}")
        running += net.arc_delta(p, t)
        if running < 0:
            return False
    return True


def _twin(net: PetriNet, decomp: Decomposition, t: int, p_from: int, p_to: int) -> int:
    """Lowest-index transition of t's type carrying t's signed weight on p_to."""
    w = net.arc_delta(p_from, t)
    ty = decomp.assignment[t]
    for cand in range(net.num_transitions):
        if decomp.assignment[cand] == ty and net.touches(p_to, cand) \
                and net.arc_delta(p_to, cand) == w:
            return cand
    raise ArcMissing(
        f"no transition of the same type as {net.transitions[t]} has weight "
        f"{w:+d} on {net.places[p_to]}")


def transfer(net: PetriNet, seq: Sequence[int], positions: Sequence[int],
             p1: int, p2: int, decomp: Decomposition) -> TransferResult:
    """Replace every sub-word transition with a same-type twin acting on p2
    instead of p1.  Requires var[p1] == var[p2]; such twins then exist."""
    if p1 not in decomp.varieties or p2 not in decomp.varieties:
        raise VarietyMismatch("both places must lie outside the vertex cover")
    if decomp.varieties[p1] != decomp.varieties[p2]:
        raise VarietyMismatch(
            f"{net.places[p1]} and {net.places[p2]} have different varieties")
    _check_subword(positions, len(seq))
    out = list(seq)
    replaced = []
    for pos in positions:
        t = seq[pos]
        if not net.touches(p1, t):
            raise PositionWithoutArc(
                f"transition {net.transitions[t]} at position {pos} has no arc "
                f"to/from {net.places[p1]}")
        t2 = _twin(net, decomp, t, p1, p2)
        out[pos] = t2
        replaced.append((pos, t, t2))
    return TransferResult(tuple(out), tuple(replaced))


def _anchored_values(net: PetriNet, seq: Sequence[int], p: int,
                     anchor_idx: int, anchor_val: int) -> List[int]:
    """Token counts of p along the chain, anchored so chain[anchor_idx] = anchor_val."""
    vals = [0] * (len(seq) + 1)
    run = 0
    for i, t in enumerate(seq):
        run += net.arc_delta(p, t)
        vals[i + 1] = run
    shift = anchor_val - vals[anchor_idx]
    return [v + shift for v in vals]


def truncate(net: PetriNet, seq: Sequence[int], p1: int, p2: int, e: int,
             idx1: int, idx2: int, idx3: int,
             decomp: Decomposition) -> Tuple[tuple, TransferResult]:
    """Peak-lowering truncation.

    Chain indices idx1 < idx2 < idx3 mark markings where p1 holds exactly e
    tokens, the in-between maximum (at least e + w^2 + w^3), and a return to
    at most e tokens.  Picks, by pigeonhole, a weight w1 added by >= w
    transitions on the way up and a weight w2 removed by >= w transitions on
    the way down; the sub-word of w2 earliest such adders plus w1 earliest
    such removers has total effect 0, its transfer strictly lowers the peak,
    and no intermediate count on p1 goes negative.
    """
    w = net.max_weight
    if not (0 <= idx1 < idx2 < idx3 <= len(seq)):
        raise HypothesesUnmet("chain indices must satisfy idx1 < idx2 < idx3")
    if p1 not in decomp.varieties or p2 not in decomp.varieties \
            or decomp.varieties[p1] != decomp.varieties[p2]:
        raise VarietyMismatch(
            f"{net.places[p1]} and {net.places[p2]} must share a variety")
    vals = _anchored_values(net, seq, p1, idx1, e)
    if vals[idx3] > e:
        raise HypothesesUnmet("tokens at the third marking must be <= e")
    threshold = e + w ** 2 + w ** 3
    if vals[idx2] < threshold:
        raise HypothesesUnmet(
            f"peak has {vals[idx2]} tokens, needs >= e + w^2 + w^3 = {threshold}")
    if vals[idx2] != max(vals[idx1:idx3 + 1]):
        raise HypothesesUnmet("the second marking must be the maximum between the others")

    low = e + w ** 2
    start = max(c for c in range(idx1, idx2 + 1) if vals[c] <= low)
    stop = min(c for c in range(idx2, idx3 + 1) if vals[c] <= low)

    def pick(step_range, want_sign):
        counts = {}
        for s in step_range:
            d = net.arc_delta(p1, seq[s])
            if want_sign * d > 0:
                counts.setdefault(abs(d), []).append(s)
        for weight in sorted(counts):
            if len(counts[weight]) >= w:
                return weight, counts[weight]
        raise HypothesesUnmet("no weight occurs often enough on the slope")

    w1, adders = pick(range(start, idx2), +1)
    w2, removers = pick(range(idx2, stop), -1)
    positions = tuple(sorted(adders[:w2] + removers[:w1]))
    result = transfer(net, seq, positions, p1, p2, decomp)
    return positions, result


@dataclass(frozen=True)
class PeakReduction:
    sequence: tuple
    within_cap: bool  # False when some peak could not be brought under the cap
    iterations: int


def reduce_peaks(net: PetriNet, seq: Sequence[int], m0, decomp: Decomposition,
                 cap: int) -> PeakReduction:
    """Repeatedly truncate until every independent place stays <= cap at every
    intermediate marking.

    Each truncation has zero total effect, so the final marking is preserved
    everywhere (in particular on special places); the peak token count
    strictly decreases per round, which bounds the iteration count.  Returns
    with within_cap=False when no qualifying truncation hypothesis arises for
    some remaining violation.
    """
    from .net import replay

    seq = tuple(seq)
    for _ in replay(net, m0, seq):  # pre: enabled at m0 (raises NotEnabled)
        pass
    iterations = 0
    stuck = set()  # places whose remaining peaks admit no qualifying truncation
    while True:
        run = list(m0)
        chain = [tuple(m0)]
        for t in seq:
            for p, d in net._delta[t]:
                run[p] += d
            chain.append(tuple(run))
        place = None
        for marking in chain:
            for p in decomp.independent:
                if marking[p] > cap and p not in stuck:
                    place = p
                    break
            if place is not None:
                break
        if place is None:
            leftover = any(
                marking[p] > cap
                for marking in chain for p in decomp.independent)
            return PeakReduction(seq, not leftover, iterations)

        vals = [marking[place] for marking in chain]
        peak = max(vals)
        idx2 = vals.index(peak)  # earliest peak first
        w = net.max_weight
        # anchor level e: the lowest value attained before the peak that the
        # trajectory comes back down to afterwards
        after_min = min(vals[idx2 + 1:]) if idx2 + 1 < len(vals) else None
        e = None
        if after_min is not None:
            for cand in sorted(set(vals[:idx2])):
                if cand >= after_min:
                    e = cand
                    break
        applied = False
        if e is not None and peak - e >= w ** 2 + w ** 3:
            idx1 = max(c for c in range(idx2) if vals[c] == e)
            idx3 = min(c for c in range(idx2 + 1, len(vals)) if vals[c] <= e)
            if vals[idx2] == max(vals[idx1:idx3 + 1]):
                _, result = truncate(net, seq, place, decomp.rep_for(place), e,
                                     idx1, idx2, idx3, decomp)
                seq = result.sequence
                iterations += 1
                applied = True
        if not applied:
            stuck.add(place)
