"""Request handlers shared by the HTTP routes and the CLI.

Each handler takes a request model and returns a response model; all
domain errors surface as NetError/ValueError for the callers to map
(HTTP 422 or CLI exit 1).
"""

from __future__ import annotations

from ..bounds import BoundParams, cover_bound_closed, cover_bound_rec, pump_bound, scs_bound
from ..deciders import (
    COVERED, INCONCLUSIVE, NOT_COVERED,
    cover_backward, cover_forward_bounded, is_bounded,
)
from ..generator import GenSpec, gen_net_detailed
from ..logic import McConfig, check_phi, classify, parse_formula, verdict_name
from ..net import (
    NetError, marking_from_map, net_from_json, net_size, net_to_json,
    parse_net, serialize_net,
)
from ..properties import propcheck
from ..structure import (
    build_graph, decompose, decomposition_report, is_cover, min_vertex_cover,
)
from .models import (
    AnalyzeRequest, AnalyzeResponse, BoundedRequest, BoundedResponse,
    BoundRecordJson, BoundsRequest, BoundsResponse, BoundValueJson,
    CoverRequest, CoverResponse, GenRequest, GenResponse, McRequest,
    McResponse, NetJson, NetSource, ParseResponse, PropcheckRequest,
    PropcheckResponse,
)


def load_net(src: NetSource):
    if src.net_text is not None:
        return parse_net(src.net_text)
    return net_from_json(src.net.model_dump(by_alias=True))


def handle_parse(src: NetSource) -> ParseResponse:
    net, m0 = load_net(src)
    return ParseResponse(
        net=NetJson(**net_to_json(net, m0)),
        size_bits=net_size(net, m0),
        num_places=net.num_places,
        num_transitions=net.num_transitions,
        max_weight=net.max_weight,
    )


def handle_analyze(req: AnalyzeRequest) -> AnalyzeResponse:
    net, _ = load_net(req)
    vc = min_vertex_cover(build_graph(net), budget=req.budget, approx=req.approx)
    report = decomposition_report(net, decompose(net, vc))
    return AnalyzeResponse(**report)


def _bound_json(bv) -> BoundValueJson:
    d = bv.to_json()
    return BoundValueJson(exact=d["exact"], log2=d["log2"])


def _bound_record(i, j, rec, closed) -> BoundRecordJson:
    shown = closed if closed is not None else rec
    d = shown.to_json()
    return BoundRecordJson(i=i, j=j, exact=d["exact"], log2=d["log2"],
                           recurrence=_bound_json(rec),
                           closed_applicable=closed is not None)


def handle_bounds(req: BoundsRequest) -> BoundsResponse:
    if req.net_text is not None or req.net is not None:
        net, m0 = load_net(req)
        target = marking_from_map(net, req.target)
        vc = min_vertex_cover(build_graph(net))
        decomp = decompose(net, vc)
        params = BoundParams(
            m=net.num_places, w=net.max_weight, k_prime=decomp.k_prime,
            r=max(target) if target else 0, u=max(m0) if m0 else 0,
            c_prime=req.c_prime, d=req.d, u_prime=req.u_prime)
    else:
        missing = [k for k in ("m", "w", "k_prime") if getattr(req, k) is None]
        if missing:
            raise NetError(f"bounds need a net or explicit {missing}")
        params = BoundParams(
            m=req.m, w=req.w, k_prime=req.k_prime, r=req.r or 0, u=req.u or 0,
            c_prime=req.c_prime, d=req.d, u_prime=req.u_prime)
    i = req.i if req.i is not None else params.k_prime
    scs_rec, scs_closed = scs_bound(i, req.j, params)
    pump_rec, pump_closed = pump_bound(i, req.j, params)
    return BoundsResponse(
        params=params.to_json(),
        cover_bound=_bound_record(i, None, cover_bound_rec(i, params),
                                  cover_bound_closed(i, params)),
        scs_bound=_bound_record(i, req.j, scs_rec, scs_closed),
        pump_bound=_bound_record(i, req.j, pump_rec, pump_closed),
        constants={"c_prime": params.c_prime, "d": params.d},
    )


def handle_cover(req: CoverRequest) -> CoverResponse:
    net, m0 = load_net(req)
    target = marking_from_map(net, req.target)
    if req.method not in ("both", "forward", "backward"):
        raise NetError(f"unknown method {req.method!r}")
    results = []
    if req.method in ("both", "backward"):
        results.append(cover_backward(net, m0, target))
    if req.method in ("both", "forward"):
        results.append(cover_forward_bounded(
            net, m0, target, max_len=req.max_len, state_cap=req.state_cap,
            node_cap=req.node_cap))
    conclusive = [r for r in results if r.verdict != INCONCLUSIVE]
    verdicts = {r.verdict for r in conclusive}
    if len(verdicts) > 1:
        raise RuntimeError("coverability methods disagree; this indicates a defect")
    primary = conclusive[0] if conclusive else results[0]
    witness = None
    for r in results:
        if r.verdict == COVERED and r.witness is not None:
            witness = [net.transitions[t] for t in r.witness]
            break
    stats = {r.method: r.stats for r in results}
    method = "both" if len(results) == 2 else results[0].method
    return CoverResponse(
        verdict=primary.verdict, witness=witness, method=method, stats=stats,
        decided=primary.verdict in (COVERED, NOT_COVERED))


def handle_bounded(req: BoundedRequest) -> BoundedResponse:
    net, m0 = load_net(req)
    if req.method not in ("both", "karp-miller", "self-covering"):
        raise NetError(f"unknown method {req.method!r}")
    res = is_bounded(net, m0, method=req.method, scs_max_len=req.scs_max_len,
                     node_cap=req.node_cap)
    return BoundedResponse(
        verdict=res.verdict, evidence=res.evidence, method=res.method,
        stats=res.stats, decided=res.verdict != INCONCLUSIVE)


def handle_mc(req: McRequest) -> McResponse:
    net, m0 = load_net(req)
    formula = parse_formula(req.formula, net)
    cfg = McConfig(max_depth=req.max_depth, node_cap=req.node_cap,
                   fallback_depth=req.fallback_depth)
    verdict = check_phi(net, m0, formula, cfg)
    return McResponse(
        formula=req.formula,
        verdict=verdict_name(verdict),
        evidence={"kind": classify(formula)},
    )


def handle_gen(req: GenRequest) -> GenResponse:
    spec = GenSpec(places=req.places, transitions=req.transitions,
                   max_weight=req.max_weight, max_initial=req.max_initial,
                   target_vc=req.target_vc)
    net, m0, planted = gen_net_detailed(spec, req.seed)
    valid = is_cover(build_graph(net), planted) if planted is not None else None
    return GenResponse(
        net_text=serialize_net(net, m0),
        net=NetJson(**net_to_json(net, m0)),
        planted_cover_valid=valid,
    )


def handle_propcheck(req: PropcheckRequest) -> PropcheckResponse:
    report = propcheck(req.suites, req.trials, req.seed)
    return PropcheckResponse(**report)
