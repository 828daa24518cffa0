"""Petri net analysis around vertex-cover structural decomposition:
firing semantics, sequence-length bounds, truncation/transfer surgery,
coverability and boundedness deciders, and an EF/boundedness model checker.
"""

from .net import (
    Marking, NetError, NotEnabled, ParseError, PetriNet, effect, fire,
    fire_relaxed, fire_sequence, marking_from_map, marking_to_map,
    net_from_json, net_size, net_to_json, parse_net, replay, serialize_net,
)
from .structure import (
    AssociationGraph, BudgetExceeded, Decomposition, InvalidCover,
    MalformedNet, VertexCover, build_graph, classify_types, compute_varieties,
    decompose, decomposition_report, min_vertex_cover,
)
from .bounds import (
    BoundParams, BoundValue, DepthZero, cover_bound_closed, cover_bound_rec,
    ef_bound_fn, pump_bound, scs_bound,
)
from .transform import (
    ArcMissing, HypothesesUnmet, PeakReduction, PositionWithoutArc,
    TransferResult, VarietyMismatch, is_safe_for_transfer, reduce_peaks,
    transfer, truncate,
)
from .deciders import (
    OMEGA, BoundedResult, CoverResult, EmptyX, KMNode, KMTree,
    PreconditionViolated, PumpingDecomposition, cover_backward,
    cover_forward_bounded, find_pumping, find_self_covering, is_bounded,
    karp_miller, shortest_cover_len, strengthen_pumping,
)
from .logic import (
    Atom, DepthLimit, EF, FormulaError, McConfig, Not, ObligationTree,
    OmegaAtom, Or, And, Term, check_beta, check_kappa, check_phi, classify,
    eval_term, find_weak_pumping_crosscheck, obligation_trees, parse_formula,
    ratio,
)
from .generator import GenSpec, InfeasibleSpec, gen_net
from .properties import propcheck, run_suite

__version__ = "0.1.0"
