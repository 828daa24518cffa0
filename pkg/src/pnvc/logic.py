"""Parser, AST, and model checker for the reachability-free query logic.

Queries combine threshold atoms over linear terms (``2*p1 + p2 >= 3``),
an exists-reachable modality ``EF(...)`` over threshold formulas, and
simultaneous-boundedness atoms ``{t1, ..., tk} < omega``; negation applies
to the boundedness side only, so reachability stays inexpressible.

Verdicts are True, False, or None (inconclusive, when a resource cap was
hit).  Threshold formulas are upward-closed in the marking, which is what
lets the coverability-tree search decide them exactly at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional

from .bounds import BoundParams, ef_bound_fn, level_cap
from .deciders import (
    OMEGA, KMTree, PumpingDecomposition, find_weak_pumping, karp_miller,
)
from .net import NetError, PetriNet
from .structure import build_graph, decompose, min_vertex_cover


class FormulaError(NetError):
    pass


class DepthLimit(NetError):
    """The nesting depth of EF exceeds the configured limit (the per-level
    bounds blow up super-exponentially in it)."""


# --- AST ---------------------------------------------------------------------

@dataclass(frozen=True)
class Term:
    coeffs: tuple  # natural coefficient per place

    def __post_init__(self):
        if not any(self.coeffs):
            raise FormulaError("term needs at least one nonzero coefficient")


@dataclass(frozen=True)
class Atom:
    """Linear threshold: term >= const."""
    term: Term
    const: int


@dataclass(frozen=True)
class OmegaAtom:
    """No reachable marking family grows all the given terms without bound."""
    terms: tuple


@dataclass(frozen=True)
class Not:
    child: object


@dataclass(frozen=True)
class And:
    left: object
    right: object


@dataclass(frozen=True)
class Or:
    left: object
    right: object


@dataclass(frozen=True)
class EF:
    child: object


def eval_term(term: Term, marking) -> int:
    total = 0
    for c, v in zip(term.coeffs, marking):
        if not c:
            continue  # 0 * omega must not poison the sum
        if v == OMEGA:
            return OMEGA
        total += c * v
    return total


def ratio(atom: Atom) -> int:
    """Smallest single-place token count certain to satisfy the atom."""
    if atom.const == 0:
        return 0
    return max(-(-atom.const // c) for c in atom.term.coeffs if c)


# --- parser ------------------------------------------------------------------

_SYMBOLS = ("&&", "||", ">=", "(", ")", "{", "}", ",", "+", "*", "!", "<")


def _tokenize(text: str):
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        two = text[i:i + 2]
        if two in _SYMBOLS:
            tokens.append((two, i))
            i += 2
            continue
        if ch in _SYMBOLS:
            tokens.append((ch, i))
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append((("num", int(text[i:j])), i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append((("name", text[i:j]), i))
            i = j
            continue
        raise FormulaError(f"unexpected character {ch!r} at position {i}")
    return tokens


class _Parser:
    def __init__(self, text: str, net: PetriNet):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.net = net

    def peek(self):
        return self.tokens[self.pos][0] if self.pos < len(self.tokens) else None

    def take(self, expected=None):
        if self.pos >= len(self.tokens):
            raise FormulaError("unexpected end of formula")
        tok, at = self.tokens[self.pos]
        if expected is not None and tok != expected:
            raise FormulaError(f"expected {expected!r} at position {at}")
        self.pos += 1
        return tok

    def parse(self):
        node = self.or_expr()
        if self.pos != len(self.tokens):
            raise FormulaError(
                f"trailing input at position {self.tokens[self.pos][1]}")
        return node

    def or_expr(self):
        node = self.and_expr()
        while self.peek() == "||":
            self.take()
            node = Or(node, self.and_expr())
        return node

    def and_expr(self):
        node = self.unary()
        while self.peek() == "&&":
            self.take()
            node = And(node, self.unary())
        return node

    def unary(self):
        if self.peek() == "!":
            self.take()
            return Not(self.unary())
        return self.primary()

    def primary(self):
        tok = self.peek()
        if tok == "(":
            self.take()
            node = self.or_expr()
            self.take(")")
            return node
        if tok == "{":
            return self.omega_atom()
        if isinstance(tok, tuple) and tok[0] == "name" and tok[1] == "EF":
            self.take()
            self.take("(")
            node = self.or_expr()
            self.take(")")
            return EF(node)
        return self.threshold_atom()

    def omega_atom(self):
        self.take("{")
        terms = [self.term()]
        while self.peek() == ",":
            self.take()
            terms.append(self.term())
        self.take("}")
        self.take("<")
        tok = self.take()
        if not (isinstance(tok, tuple) and tok == ("name", "omega")):
            raise FormulaError("expected 'omega' after '<'")
        return OmegaAtom(tuple(terms))

    def threshold_atom(self):
        term = self.term()
        self.take(">=")
        tok = self.take()
        if not (isinstance(tok, tuple) and tok[0] == "num"):
            raise FormulaError("expected a natural number after '>='")
        return Atom(term, tok[1])

    def term(self) -> Term:
        coeffs = list(self.product())
        while self.peek() == "+":
            self.take()
            for i, c in enumerate(self.product()):
                coeffs[i] += c
        return Term(tuple(coeffs))

    def product(self):
        tok = self.peek()
        coeff = 1
        if isinstance(tok, tuple) and tok[0] == "num":
            coeff = self.take()[1]
            self.take("*")
        tok = self.peek()
        if tok == "(":
            self.take()
            inner = self.term()
            self.take(")")
            return tuple(coeff * c for c in inner.coeffs)
        if isinstance(tok, tuple) and tok[0] == "name":
            name = self.take()[1]
            if name not in self.net.place_index:
                raise FormulaError(f"unknown place {name!r}")
            out = [0] * self.net.num_places
            out[self.net.place_index[name]] = coeff
            return tuple(out)
        raise FormulaError("expected a place name")


def parse_formula(text: str, net: PetriNet):
    node = _Parser(text, net).parse()
    classify(node)  # reject malformed nestings early
    return node


def classify(node) -> str:
    """'kappa' for threshold/EF subtrees, 'beta' for boundedness subtrees,
    'phi' for top-level mixes.  Raises on invalid nesting."""
    if isinstance(node, Atom):
        return "kappa"
    if isinstance(node, OmegaAtom):
        return "beta"
    if isinstance(node, Not):
        if classify(node.child) != "beta":
            raise FormulaError("negation applies to boundedness formulas only")
        return "beta"
    if isinstance(node, EF):
        if classify(node.child) != "kappa":
            raise FormulaError("EF takes a threshold formula")
        return "kappa"
    if isinstance(node, And):
        kinds = (classify(node.left), classify(node.right))
        return "kappa" if kinds == ("kappa", "kappa") else "phi"
    if isinstance(node, Or):
        kinds = (classify(node.left), classify(node.right))
        if kinds == ("kappa", "kappa"):
            return "kappa"
        if kinds == ("beta", "beta"):
            return "beta"
        return "phi"
    raise FormulaError(f"not a formula node: {node!r}")


def ef_depth(node) -> int:
    if isinstance(node, Atom):
        return 0
    if isinstance(node, EF):
        return 1 + ef_depth(node.child)
    if isinstance(node, (And, Or)):
        return max(ef_depth(node.left), ef_depth(node.right))
    return 0


# --- obligation trees --------------------------------------------------------

@dataclass(frozen=True)
class ObligationNode:
    atoms: tuple  # conjunction of Atom
    children: tuple  # ObligationNode per EF conjunct


@dataclass(frozen=True)
class ObligationTree:
    root: ObligationNode
    depth: int  # number of levels (root at level 0)


def _node_depth(node: ObligationNode) -> int:
    return 1 + max((_node_depth(c) for c in node.children), default=0)


def _resolutions(node):
    """All ways of committing the disjunctions, left branch first, each as an
    ObligationNode (atoms plus EF children)."""
    if isinstance(node, Atom):
        yield ObligationNode((node,), ())
    elif isinstance(node, EF):
        for sub in _resolutions(node.child):
            yield ObligationNode((), (sub,))
    elif isinstance(node, Or):
        yield from _resolutions(node.left)
        yield from _resolutions(node.right)
    elif isinstance(node, And):
        for left in _resolutions(node.left):
            for right in _resolutions(node.right):
                yield ObligationNode(left.atoms + right.atoms,
                                     left.children + right.children)
    else:
        raise FormulaError("threshold formulas admit atoms, &&, ||, EF only")


def obligation_trees(node):
    """Stream every disjunct-resolution of a threshold formula as a tree of
    content/children obligations."""
    if classify(node) != "kappa":
        raise FormulaError("obligation trees are defined for threshold formulas")
    for root in _resolutions(node):
        yield ObligationTree(root, _node_depth(root))


# --- model checking ----------------------------------------------------------

@dataclass
class McConfig:
    max_depth: int = 6  # refuse deeper EF nestings by default
    node_cap: int = 100_000
    fallback_depth: int = 10_000  # per-edge cap when the bound is log-space only
    approx_cover: bool = False


def _level_ratios(tree: ObligationTree) -> List[int]:
    out = [0] * tree.depth

    def walk(node, level):
        for atom in node.atoms:
            out[level] = max(out[level], ratio(atom))
        for child in node.children:
            walk(child, level + 1)

    walk(tree.root, 0)
    return out


def _decomposition_params(net: PetriNet, cfg: McConfig) -> BoundParams:
    vc = min_vertex_cover(build_graph(net), approx=cfg.approx_cover)
    decomp = decompose(net, vc)
    return BoundParams(m=net.num_places, w=net.max_weight, k_prime=decomp.k_prime)


def _tribool_all(results):
    verdict = True
    for r in results:
        if r is False:
            return False
        if r is None:
            verdict = None
    return verdict


def _tribool_any(results):
    verdict = False
    for r in results:
        if r is True:
            return True
        if r is None:
            verdict = None
    return verdict


class _KappaChecker:
    """Checks one obligation tree by searching child witnesses over the
    coverability tree (sound and complete for these upward-closed targets:
    an omega place can be realized above any finite demand).

    Per-edge exploration depth is capped by the covering bound for the
    child level when that bound materializes, else by the configured
    fallback; hitting a cap makes the verdict inconclusive rather than
    negative.
    """

    def __init__(self, net: PetriNet, params: BoundParams, cfg: McConfig):
        self.net = net
        self.params = params
        self.cfg = cfg
        self.memo = {}
        self.km_cache = {}

    def check(self, m0, tree: ObligationTree):
        levels = ef_bound_fn(tree.depth, _level_ratios(tree),
                             self.params, list(m0))
        self.caps = []
        for lvl in range(tree.depth):
            if lvl == 0:
                self.caps.append(None)
                continue
            cap_bv = level_cap(levels, lvl, self.params)
            self.caps.append(
                cap_bv.exact if cap_bv.exact is not None
                else self.cfg.fallback_depth)
        return self._holds(tree.root, tuple(m0), 0)

    def _holds(self, node: ObligationNode, marking, level):
        key = (id(node), marking)
        if key in self.memo:
            return self.memo[key]
        result = True
        for atom in node.atoms:
            if eval_term(atom.term, marking) < atom.const:
                result = False
                break
        if result is True:
            result = _tribool_all(
                self._exists(child, marking, level + 1)
                for child in node.children)
        self.memo[key] = result
        return result

    def _exists(self, node: ObligationNode, marking, level):
        cap = self.caps[level] if level < len(self.caps) else None
        cache_key = (marking, cap)
        tree = self.km_cache.get(cache_key)
        if tree is None:
            tree = karp_miller(self.net, marking, node_cap=self.cfg.node_cap,
                               depth_cap=cap)
            self.km_cache[cache_key] = tree
        saw_inconclusive = not tree.complete
        for km_node in tree.nodes:
            r = self._holds(node, km_node.marking, level)
            if r is True:
                return True
            if r is None:
                saw_inconclusive = True
        return None if saw_inconclusive else False


def check_kappa(net: PetriNet, m0, node, cfg: Optional[McConfig] = None,
                params: Optional[BoundParams] = None):
    """True iff some obligation tree is witnessed from the initial marking."""
    cfg = cfg or McConfig()
    if classify(node) != "kappa":
        raise FormulaError("not a threshold formula")
    depth = 1 + ef_depth(node)
    if depth > cfg.max_depth:
        raise DepthLimit(
            f"EF nesting depth {depth - 1} exceeds the configured limit "
            f"{cfg.max_depth - 1}")
    if params is None:
        params = _decomposition_params(net, cfg)
    saw_inconclusive = False
    for tree in obligation_trees(node):
        r = _KappaChecker(net, params, cfg).check(m0, tree)
        if r is True:
            return True
        if r is None:
            saw_inconclusive = True
    return None if saw_inconclusive else False


def _beta_atom_false(tree: KMTree, atom: OmegaAtom) -> bool:
    """The atom fails iff one tree node is simultaneously omega on a hitting
    set of the terms."""
    for node in tree.nodes:
        if all(
            any(c >= 1 and node.marking[p] == OMEGA
                for p, c in enumerate(term.coeffs))
            for term in atom.terms
        ):
            return True
    return False


def check_beta(net: PetriNet, m0, node, cfg: Optional[McConfig] = None):
    cfg = cfg or McConfig()
    if classify(node) != "beta":
        raise FormulaError("not a boundedness formula")
    tree = karp_miller(net, m0, node_cap=cfg.node_cap)

    def walk(n):
        if isinstance(n, OmegaAtom):
            if not tree.complete:
                return None
            return not _beta_atom_false(tree, n)
        if isinstance(n, Not):
            r = walk(n.child)
            return None if r is None else not r
        if isinstance(n, Or):
            return _tribool_any((walk(n.left), walk(n.right)))
        raise FormulaError("boundedness formulas admit atoms, !, || only")

    return walk(node)


def check_phi(net: PetriNet, m0, node, cfg: Optional[McConfig] = None,
              params: Optional[BoundParams] = None):
    """Three-valued evaluation of the full logic; short-circuits only on
    decided sub-results so inconclusives propagate."""
    cfg = cfg or McConfig()
    kind = classify(node)
    if kind == "kappa":
        return check_kappa(net, m0, node, cfg, params)
    if kind == "beta":
        return check_beta(net, m0, node, cfg)
    if isinstance(node, And):
        return _tribool_all((check_phi(net, m0, node.left, cfg, params),
                             check_phi(net, m0, node.right, cfg, params)))
    if isinstance(node, Or):
        return _tribool_any((check_phi(net, m0, node.left, cfg, params),
                             check_phi(net, m0, node.right, cfg, params)))
    raise FormulaError(f"not a formula node: {node!r}")


def find_weak_pumping_crosscheck(net: PetriNet, m0, x: Iterable, max_len: int
                                 ) -> Optional[PumpingDecomposition]:
    """Desk-scale exhaustive search for weakly enabled pumping sequences,
    used to cross-check boundedness-atom verdicts on tiny nets."""
    return find_weak_pumping(net, m0, x, max_len)


def verdict_name(value) -> str:
    return {True: "true", False: "false", None: "inconclusive"}[value]
