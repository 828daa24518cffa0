import itertools

import pytest

from pnvc.net import PetriNet
from pnvc.structure import (
    BudgetExceeded, InvalidCover, MalformedNet, build_graph, classify_types,
    compute_varieties, decompose, decomposition_report, is_cover, le_pow2,
    min_vertex_cover, type_count_cap, variety_count_cap_exponent,
)


def brute_force_min_cover(graph):
    best = None
    for size in range(graph.num_vertices + 1):
        for members in itertools.combinations(range(graph.num_vertices), size):
            if is_cover(graph, members):
                return set(members), size
    return best


def test_graph_net_a(net_a):
    net, _ = net_a
    g = build_graph(net)
    assert g.edges == frozenset({(0, 1), (0, 2), (1, 2)})
    assert g.self_loops == frozenset()


def test_graph_isolated_place():
    net = PetriNet("x", ["a", "b", "c"], ["t"],
                   pre=[[1], [0], [0]], post=[[0], [1], [0]])
    g = build_graph(net)
    assert all(2 not in e for e in g.edges)


def test_graph_self_loop():
    net = PetriNet("x", ["a"], ["t"], pre=[[1]], post=[[1]])
    g = build_graph(net)
    assert g.self_loops == frozenset({0})


def test_min_cover_triangle(net_a):
    net, _ = net_a
    vc = min_vertex_cover(build_graph(net))
    assert vc.members == (0, 1) and vc.k == 2  # lexicographic tie-break


def test_min_cover_edgeless():
    net = PetriNet("x", ["a", "b"], [], pre=[[], []], post=[[], []])
    vc = min_vertex_cover(build_graph(net))
    assert vc.members == () and vc.k == 0


def test_min_cover_self_loop_forced():
    net = PetriNet("x", ["a", "b", "c"], ["t", "u"],
                   pre=[[1, 0], [0, 1], [0, 0]],
                   post=[[1, 0], [0, 0], [0, 1]])
    vc = min_vertex_cover(build_graph(net))
    assert 0 in vc.members  # the self-loop vertex is always in


def test_min_cover_budget():
    net, _ = pytest.importorskip("pnvc.net"), None
    from pnvc.net import parse_net
    from conftest import NET_A_TEXT
    netA, _ = parse_net(NET_A_TEXT)
    with pytest.raises(BudgetExceeded) as exc:
        min_vertex_cover(build_graph(netA), budget=1)
    assert exc.value.lower_bound == 2


def test_min_cover_matches_brute_force_small_graphs():
    import random
    rng = random.Random(7)
    for trial in range(70):
        m = rng.randint(1, 12)
        n = rng.randint(0, 8)
        pre = [[rng.choice([0, 0, 0, 1]) for _ in range(n)] for _ in range(m)]
        post = [[rng.choice([0, 0, 0, 1]) for _ in range(n)] for _ in range(m)]
        net = PetriNet("r", [f"p{i}" for i in range(m)],
                       [f"t{j}" for j in range(n)], pre, post)
        g = build_graph(net)
        vc = min_vertex_cover(g)
        _, best = brute_force_min_cover(g)
        assert vc.k == best
        assert is_cover(g, vc.members)
        # the tie-break picks the lexicographically smallest optimum
        smallest = min(
            (members for size in (best,)
             for members in itertools.combinations(range(m), size)
             if is_cover(g, members)),
            default=())
        assert vc.members == tuple(smallest)


def test_greedy_mode_flagged():
    net = PetriNet("x", ["a", "b"], ["t"], pre=[[1], [0]], post=[[0], [1]])
    vc = min_vertex_cover(build_graph(net), approx=True)
    assert not vc.exact
    assert is_cover(build_graph(net), vc.members)


def test_types_net_b(net_b):
    net, _ = net_b
    vc = min_vertex_cover(build_graph(net))
    assert [net.places[p] for p in vc.members] == ["p1", "p2", "p3", "p4"]
    types, assignment = classify_types(net, vc)
    t = net.transition_index
    assert assignment[t["t1"]] == assignment[t["t5"]]
    assert assignment[t["t2"]] == assignment[t["t6"]]
    assert len(types) == 4
    assert len(types) <= type_count_cap(net.max_weight, vc.k)


def test_types_all_places_cover(net_a):
    net, _ = net_a
    from pnvc.structure import VertexCover
    vc = VertexCover((0, 1, 2), 3)
    types, assignment = classify_types(net, vc)
    assert len(types) == 2  # distinct full columns


def test_types_single_transition():
    net = PetriNet("x", ["a", "b"], ["t"], pre=[[1], [0]], post=[[0], [1]])
    vc = min_vertex_cover(build_graph(net))
    types, _ = classify_types(net, vc)
    assert len(types) == 1


def test_invalid_cover_rejected(net_a):
    net, _ = net_a
    from pnvc.structure import VertexCover
    with pytest.raises(InvalidCover):
        classify_types(net, VertexCover((0,), 1))


def test_varieties_net_b(net_b):
    net, _ = net_b
    vc = min_vertex_cover(build_graph(net))
    types, assignment = classify_types(net, vc)
    varieties = compute_varieties(net, vc, types, assignment)
    p = net.place_index
    assert varieties[p["p5"]] == varieties[p["p6"]]


def test_varieties_net_a(net_a):
    net, _ = net_a
    vc = min_vertex_cover(build_graph(net))
    types, assignment = classify_types(net, vc)
    varieties = compute_varieties(net, vc, types, assignment)
    var_p3 = varieties[2]
    # one type adds one token to p3, the other never touches it
    assert sorted(var_p3, key=lambda s: sorted(s)) in (
        [frozenset(), frozenset({1})], [frozenset({1}), frozenset()])
    by_type = {assignment[0]: net.arc_delta(2, 0)}
    assert var_p3[assignment[0]] == frozenset({1})
    assert var_p3[assignment[1]] == frozenset()


def test_untouched_place_has_empty_variety():
    net = PetriNet("x", ["a", "b"], ["t"], pre=[[1], [0]], post=[[0], [0]])
    vc = min_vertex_cover(build_graph(net))
    types, assignment = classify_types(net, vc)
    varieties = compute_varieties(net, vc, types, assignment)
    assert all(s == frozenset() for s in varieties[1])


def test_malformed_self_loop_outside_cover():
    # b consumes and produces on the same transition; any valid cover must
    # contain it, so handing compute_varieties a cover without it trips the
    # consistency error
    net = PetriNet("x", ["a", "b"], ["u"], pre=[[1], [1]], post=[[0], [1]])
    from pnvc.structure import VertexCover
    vc = VertexCover((0,), 1)
    sig = ((net.pre[0][0], net.post[0][0]),)
    with pytest.raises(MalformedNet):
        compute_varieties(net, vc, [sig], [0])


def test_decompose_net_b(net_b):
    net, _ = net_b
    vc = min_vertex_cover(build_graph(net))
    d = decompose(net, vc)
    names = [net.places[p] for p in d.special]
    assert names == ["p1", "p2", "p3", "p4", "p5"]
    assert [net.places[p] for p in d.independent] == ["p6"]
    assert d.k_prime == 5


def test_decompose_net_a(net_a):
    net, _ = net_a
    d = decompose(net, min_vertex_cover(build_graph(net)))
    assert d.special == (0, 1, 2) and d.independent == ()
    assert d.k_prime == 3


def test_decompose_all_places_cover(net_a):
    net, _ = net_a
    from pnvc.structure import VertexCover
    d = decompose(net, VertexCover((0, 1, 2), 3))
    assert d.special == (0, 1, 2) and d.independent == ()


def test_decompose_representative_order(net_b):
    net, _ = net_b
    vc = min_vertex_cover(build_graph(net))
    p = net.place_index
    d = decompose(net, vc, representative_order=[p["p6"], p["p5"]])
    assert p["p6"] in d.special and p["p5"] in d.independent


def test_k_prime_cap(net_b):
    net, _ = net_b
    vc = min_vertex_cover(build_graph(net))
    d = decompose(net, vc)
    assert le_pow2(d.k_prime - vc.k,
                   variety_count_cap_exponent(net.max_weight, vc.k))


def test_exchange_property_net_b(net_b):
    # equal varieties really do mean every arc has a same-type counterpart
    net, _ = net_b
    vc = min_vertex_cover(build_graph(net))
    d = decompose(net, vc)
    p5, p6 = net.place_index["p5"], net.place_index["p6"]
    for t in range(net.num_transitions):
        if net.touches(p5, t):
            w = net.arc_delta(p5, t)
            assert any(
                d.assignment[u] == d.assignment[t] and net.arc_delta(p6, u) == w
                for u in range(net.num_transitions) if net.touches(p6, u))


def test_report_shape(net_b):
    net, _ = net_b
    d = decompose(net, min_vertex_cover(build_graph(net)))
    report = decomposition_report(net, d)
    assert set(report) == {"k", "k_prime", "cover", "cover_exact", "num_types",
                           "varieties", "special", "independent"}
    assert report["varieties"] == {"p5": 0, "p6": 0}
