"""Seed-deterministic random net generator.

Same spec and seed always produce byte-identical net text.  When
``target_vc`` is set, every transition touches at most one place outside
the planted set and never on both sides, so the planted set covers the
association graph by construction.  Thirty percent of nets get a pumping
gadget (a transition with strictly positive net effect enabled at the
initial marking) so boundedness suites see both verdicts.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from .net import NetError, PetriNet


class InfeasibleSpec(NetError):
    pass


@dataclass(frozen=True)
class GenSpec:
    places: int
    transitions: int
    max_weight: int = 1
    max_initial: int = 1
    target_vc: Optional[int] = None
    pump_bias: float = 0.3


def gen_net(spec: GenSpec, seed: int):
    """Returns (PetriNet, initial marking), fully determined by (spec, seed)."""
    net, m0, _ = gen_net_detailed(spec, seed)
    return net, m0


def gen_net_detailed(spec: GenSpec, seed: int):
    """Like gen_net but also returns the planted cover (place indices) or None."""
    if spec.places < 1:
        raise InfeasibleSpec("need at least one place")
    if spec.max_weight < 1:
        raise InfeasibleSpec("max weight must be >= 1")
    if spec.target_vc is not None:
        if spec.target_vc > spec.places:
            raise InfeasibleSpec("planted cover larger than the net")
        if spec.target_vc == 0 and spec.transitions > 0:
            raise InfeasibleSpec(
                "a transition needs input and output arcs, which forces a "
                "self-loop when it may touch at most one place; no empty "
                "cover can absorb that")

    rng = random.Random(seed)
    m, n = spec.places, spec.transitions
    place_names = [f"p{i + 1}" for i in range(m)]
    trans_names = [f"t{i + 1}" for i in range(n)]
    pre = [[0] * n for _ in range(m)]
    post = [[0] * n for _ in range(m)]

    cover = None
    if spec.target_vc is not None:
        cover = sorted(rng.sample(range(m), spec.target_vc))
    noncover = [p for p in range(m) if cover is None or p not in cover]

    def weight():
        return rng.randint(1, spec.max_weight)

    for t in range(n):
        if cover is None:
            pool = list(range(m))
            ins = rng.sample(pool, rng.randint(1, min(3, m)))
            outs = rng.sample(pool, rng.randint(1, min(3, m)))
        else:
            free = rng.choice(noncover) if noncover and rng.random() < 0.5 else None
            side = rng.choice(("in", "out")) if free is not None else None
            ins, outs = [], []
            if side == "in":
                ins.append(free)
            elif side == "out":
                outs.append(free)
            want_in = rng.randint(1, min(3, max(1, len(cover))))
            want_out = rng.randint(1, min(3, max(1, len(cover))))
            ins.extend(rng.sample(cover, min(want_in, len(cover))) if cover else [])
            outs.extend(rng.sample(cover, min(want_out, len(cover))) if cover else [])
            if not ins or not outs:
                raise InfeasibleSpec("planted cover too small for arc quotas")
        for p in ins:
            pre[p][t] = weight()
        for p in outs:
            post[p][t] = weight()

    marking = [rng.randint(0, spec.max_initial) for _ in range(m)]

    # pumping gadget: rewrite the last transition into a self-loop that nets
    # one extra token, enabled at the initial marking
    if n > 0 and rng.random() < spec.pump_bias:
        host_pool = cover if cover else list(range(m))
        if spec.max_weight >= 2 and host_pool:
            q = rng.choice(host_pool)
            t = n - 1
            for p in range(m):
                pre[p][t] = post[p][t] = 0
            pre[q][t] = 1
            post[q][t] = 2
            marking[q] = max(marking[q], 1) if spec.max_initial >= 1 else marking[q]
        elif host_pool and len(host_pool) >= 2:
            q, r = rng.sample(host_pool, 2)
            t = n - 1
            for p in range(m):
                pre[p][t] = post[p][t] = 0
            pre[q][t] = 1
            post[q][t] = 1
            post[r][t] = 1
            marking[q] = max(marking[q], 1) if spec.max_initial >= 1 else marking[q]

    net = PetriNet(f"gen{seed}", place_names, trans_names, pre, post)
    return net, tuple(marking), tuple(cover) if cover is not None else None
