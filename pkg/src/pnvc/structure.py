"""Structural decomposition of a net around a vertex cover of its
association graph: transition types, place varieties, and the split of
places into a special core and interchangeable independent places.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence

from .net import NetError, PetriNet


class InvalidCover(NetError):
    """The supplied place set does not cover every edge of the association graph."""


class MalformedNet(NetError):
    """A non-cover place both consumes from and produces to one transition,
    which contradicts cover validity (such a place has a self-loop)."""


class BudgetExceeded(NetError):
    def __init__(self, budget: int, lower_bound: int):
        super().__init__(
            f"no vertex cover of size <= {budget}; minimum is at least {lower_bound}")
        self.budget = budget
        self.lower_bound = lower_bound


@dataclass(frozen=True)
class AssociationGraph:
    """Places as vertices; an edge joins two places touched by one transition."""
    num_vertices: int
    edges: frozenset  # of (i, j) pairs with i < j
    self_loops: frozenset  # of vertex indices


def build_graph(net: PetriNet) -> AssociationGraph:
    edges = set()
    loops = set()
    for t in range(net.num_transitions):
        touched = net._touched[t]
        for p in touched:
            if net.pre[p][t] >= 1 and net.post[p][t] >= 1:
                loops.add(p)
        for a, b in combinations(touched, 2):
            edges.add((a, b))
    return AssociationGraph(net.num_places, frozenset(edges), frozenset(loops))


@dataclass(frozen=True)
class VertexCover:
    members: tuple  # sorted place indices
    k: int
    exact: bool = True  # False when produced by the greedy approximation


def is_cover(graph: AssociationGraph, members) -> bool:
    mset = set(members)
    if not graph.self_loops <= mset:
        return False
    return all(a in mset or b in mset for a, b in graph.edges)


def _branch_cover(edges, k):
    """Return a cover of the edge list of size <= k, or None.

    Bounded-depth branching on an uncovered edge: include either endpoint.
    """
    if not edges:
        return set()
    if k == 0:
        return None
    a, b = edges[0]
    for v in (a, b) if a != b else (a,):
        rest = [e for e in edges if v not in e]
        sub = _branch_cover(rest, k - 1)
        if sub is not None:
            sub.add(v)
            return sub
    return None


def min_vertex_cover(graph: AssociationGraph, budget: Optional[int] = None,
                     approx: bool = False) -> VertexCover:
    """Minimum vertex cover containing all self-loop vertices.

    Ties are broken toward the lexicographically smallest member set in
    place-declaration order.  With ``approx=True`` a greedy 2-approximation
    is returned instead (flagged non-exact).  If ``budget`` is given and the
    minimum exceeds it, BudgetExceeded reports budget+1 as the proven lower
    bound.
    """
    forced = set(graph.self_loops)
    edges = sorted(e for e in graph.edges if e[0] not in forced and e[1] not in forced)

    if approx:
        members = set(forced)
        remaining = list(edges)
        while remaining:
            a, b = remaining[0]
            members.update((a, b))
            remaining = [e for e in remaining if a not in e and b not in e]
        if budget is not None and len(members) > budget:
            raise BudgetExceeded(budget, len(forced))
        return VertexCover(tuple(sorted(members)), len(members), exact=False)

    def feasible(extra_forced, size):
        rem = size - len(forced) - len(extra_forced)
        if rem < 0:
            return False
        live = [e for e in edges if e[0] not in extra_forced and e[1] not in extra_forced]
        return _branch_cover(live, rem) is not None

    k_min = len(forced)
    while not feasible(set(), k_min):
        k_min += 1
        if budget is not None and k_min > budget:
            raise BudgetExceeded(budget, budget + 1)
    if budget is not None and k_min > budget:
        raise BudgetExceeded(budget, k_min)

    # lexicographic extraction: greedily admit the smallest-indexed places
    # that still leave a cover of minimum size reachable
    chosen = set(forced)
    uncovered = list(edges)
    for v in range(graph.num_vertices):
        if len(chosen) == k_min or not uncovered:
            break
        if v in chosen:
            continue
        trial = chosen | {v}
        live = [e for e in uncovered if v not in e]
        rem = k_min - len(trial)
        if rem >= 0 and _branch_cover(live, rem) is not None:
            chosen = trial
            uncovered = live
    return VertexCover(tuple(sorted(chosen)), len(chosen))


TypeSignature = tuple  # ((pre, post) per cover place, declaration order)


def classify_types(net: PetriNet, vc: VertexCover):
    """Partition transitions by their pre/post restriction to the cover.

    Returns (types, assignment): ``types`` lists the distinct signatures in
    lexicographic order (so indices are stable) and ``assignment[t]`` is the
    type index of transition t.
    """
    graph = build_graph(net)
    if not is_cover(graph, vc.members):
        raise InvalidCover("supplied place set is not a vertex cover")
    sigs = [
        tuple((net.pre[p][t], net.post[p][t]) for p in vc.members)
        for t in range(net.num_transitions)
    ]
    types = sorted(set(sigs))
    index = {sig: j for j, sig in enumerate(types)}
    return types, [index[sig] for sig in sigs]


Variety = tuple  # per type index, a frozenset of nonzero signed weights


def compute_varieties(net: PetriNet, vc: VertexCover, types, assignment) -> dict:
    """Variety of each non-cover place: per transition type, the set of
    signed arc weights the place exhibits on transitions of that type."""
    cover = set(vc.members)
    out = {}
    for p in range(net.num_places):
        if p in cover:
            continue
        sets = [set() for _ in types]
        for t in range(net.num_transitions):
            pre_w, post_w = net.pre[p][t], net.post[p][t]
            if pre_w and post_w:
                raise MalformedNet(
                    f"place {net.places[p]} has a self-loop on transition "
                    f"{net.transitions[t]} but is not in the cover")
            if pre_w or post_w:
                sets[assignment[t]].add(post_w - pre_w)
        out[p] = tuple(frozenset(s) for s in sets)
    return out


@dataclass(frozen=True)
class Decomposition:
    vc: VertexCover
    types: tuple
    assignment: tuple  # transition -> type index
    varieties: dict  # non-cover place -> Variety
    special: tuple  # sorted place indices: cover + one representative per variety
    independent: tuple  # the remaining places
    k_prime: int
    representative: dict  # Variety -> representative place index

    def rep_for(self, p: int) -> int:
        return self.representative[self.varieties[p]]


def decompose(net: PetriNet, vc: VertexCover,
              representative_order: Optional[Sequence] = None) -> Decomposition:
    """Build the special/independent split.

    The representative of each variety is the first non-cover place showing
    it, in declaration order by default; ``representative_order`` overrides
    the priority (useful to exercise transfers in either direction).
    """
    types, assignment = classify_types(net, vc)
    varieties = compute_varieties(net, vc, types, assignment)
    order = list(representative_order) if representative_order is not None else \
        sorted(varieties.keys())
    reps = {}
    for p in order:
        v = varieties[p]
        reps.setdefault(v, p)
    special = tuple(sorted(set(vc.members) | set(reps.values())))
    independent = tuple(p for p in range(net.num_places) if p not in set(special))
    return Decomposition(
        vc=vc,
        types=tuple(types),
        assignment=tuple(assignment),
        varieties=varieties,
        special=special,
        independent=independent,
        k_prime=len(special),
        representative=reps,
    )


def type_count_cap(max_weight: int, k: int) -> int:
    return (max_weight + 1) ** (2 * k)


def variety_count_cap_exponent(max_weight: int, k: int) -> int:
    """Exponent e such that the number of distinct varieties is <= 2**e."""
    return 2 * max_weight * type_count_cap(max_weight, k)


def le_pow2(x: int, e: int) -> bool:
    """x <= 2**e without materializing huge powers."""
    if x <= 0:
        return True
    return (x - 1).bit_length() <= e


def decomposition_report(net: PetriNet, decomp: Decomposition) -> dict:
    seen = {}
    var_ids = {}
    for p in sorted(decomp.varieties.keys()):
        v = decomp.varieties[p]
        if v not in seen:
            seen[v] = len(seen)
        var_ids[net.places[p]] = seen[v]
    return {
        "k": decomp.vc.k,
        "k_prime": decomp.k_prime,
        "cover": [net.places[p] for p in decomp.vc.members],
        "cover_exact": decomp.vc.exact,
        "num_types": len(decomp.types),
        "varieties": var_ids,
        "special": [net.places[p] for p in decomp.special],
        "independent": [net.places[p] for p in decomp.independent],
    }
