"""Petri net data model, firing semantics, and the text/JSON net formats.

Markings are plain tuples of ints indexed by place position, so they are
hashable and cheap to copy in search loops.  Token counts are Python ints
and may grow without bound.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Optional, Sequence


class NetError(Exception):
    """Base class for net-level errors."""


class ParseError(NetError):
    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NotEnabled(NetError):
    """A transition was fired without enough tokens.

    ``place`` names the first deficient place in declaration order;
    ``step`` is the 1-based failing position for sequence replays.
    """

    def __init__(self, net: "PetriNet", t: int, place: int, step: Optional[int] = None):
        self.transition = net.transitions[t]
        self.place = net.places[place]
        self.step = step
        at = f" at step {step}" if step is not None else ""
        super().__init__(
            f"transition {self.transition} not enabled{at}: "
            f"place {self.place} has too few tokens"
        )


Marking = tuple  # place-indexed token counts; ints for strict, may be negative when relaxed
FiringSequence = Sequence  # transition indices


class PetriNet:
    """Immutable place/transition net with weighted arcs.

    ``pre[p][t]`` is the number of tokens transition ``t`` consumes from
    place ``p``, ``post[p][t]`` the number it produces.  ``max_weight`` is
    always derived from the matrices (1 for an arcless net) and never
    user-supplied.
    """

    __slots__ = (
        "name", "places", "transitions", "pre", "post", "max_weight",
        "place_index", "transition_index", "_needs", "_delta", "_touched",
    )

    def __init__(self, name, places, transitions, pre, post):
        places = tuple(places)
        transitions = tuple(transitions)
        if not places:
            raise NetError("net must declare at least one place")
        if len(set(places)) != len(places):
            raise NetError("duplicate place identifier")
        if len(set(transitions)) != len(transitions):
            raise NetError("duplicate transition identifier")
        m, n = len(places), len(transitions)
        pre = tuple(tuple(row) for row in pre)
        post = tuple(tuple(row) for row in post)
        for mat, label in ((pre, "pre"), (post, "post")):
            if len(mat) != m or any(len(row) != n for row in mat):
                raise NetError(f"{label} matrix shape must be {m}x{n}")
            for row in mat:
                for w in row:
                    if not isinstance(w, int) or w < 0:
                        raise NetError(f"negative or non-integer weight in {label} matrix")
        self.name = name
        self.places = places
        self.transitions = transitions
        self.pre = pre
        self.post = post
        entries = [w for mat in (pre, post) for row in mat for w in row]
        self.max_weight = max(entries) if entries and max(entries) >= 1 else 1
        self.place_index = {p: i for i, p in enumerate(places)}
        self.transition_index = {t: i for i, t in enumerate(transitions)}
        # per-transition sparse views, in place-declaration order
        self._needs = tuple(
            tuple((p, pre[p][t]) for p in range(m) if pre[p][t] > 0) for t in range(n)
        )
        self._delta = tuple(
            tuple((p, post[p][t] - pre[p][t])
                  for p in range(m) if post[p][t] != pre[p][t])
            for t in range(n)
        )
        self._touched = tuple(
            tuple(p for p in range(m) if pre[p][t] > 0 or post[p][t] > 0)
            for t in range(n)
        )

    @property
    def num_places(self) -> int:
        return len(self.places)

    @property
    def num_transitions(self) -> int:
        return len(self.transitions)

    def arc_delta(self, p: int, t: int) -> int:
        """Signed token change of transition t on place p."""
        return self.post[p][t] - self.pre[p][t]

    def touches(self, p: int, t: int) -> bool:
        return self.pre[p][t] > 0 or self.post[p][t] > 0

    def enabled(self, marking: Marking, t: int) -> bool:
        return all(marking[p] >= w for p, w in self._needs[t])

    def first_deficient(self, marking: Marking, t: int) -> Optional[int]:
        for p, w in self._needs[t]:
            if marking[p] < w:
                return p
        return None

    def __eq__(self, other):
        return (
            isinstance(other, PetriNet)
            and self.places == other.places
            and self.transitions == other.transitions
            and self.pre == other.pre
            and self.post == other.post
        )

    def __hash__(self):
        return hash((self.places, self.transitions, self.pre, self.post))

    def __repr__(self):
        return f"PetriNet({self.name!r}, {self.num_places} places, {self.num_transitions} transitions)"


def marking_from_map(net: PetriNet, values: dict) -> Marking:
    for p, v in values.items():
        if p not in net.place_index:
            raise NetError(f"unknown place {p!r}")
        if int(v) < 0:
            raise NetError(f"negative token count for place {p!r}")
    return tuple(int(values.get(p, 0)) for p in net.places)


def marking_to_map(net: PetriNet, marking: Marking, skip_zero: bool = True) -> dict:
    return {
        p: marking[i] for i, p in enumerate(net.places)
        if marking[i] != 0 or not skip_zero
    }


def fire(net: PetriNet, marking: Marking, t: int) -> Marking:
    """Fire one transition; raises NotEnabled naming the first deficient place."""
    p = net.first_deficient(marking, t)
    if p is not None:
        raise NotEnabled(net, t, p)
    out = list(marking)
    for p, d in net._delta[t]:
        out[p] += d
    return tuple(out)


def replay(net: PetriNet, marking: Marking, seq: FiringSequence) -> Iterator[Marking]:
    """Streaming replay: yields the marking after each step (not the start).

    Raises NotEnabled with the 1-based failing step; used instead of
    fire_sequence when the chain should not be materialized.
    """
    cur = marking
    for i, t in enumerate(seq):
        p = net.first_deficient(cur, t)
        if p is not None:
            raise NotEnabled(net, t, p, step=i + 1)
        out = list(cur)
        for p, d in net._delta[t]:
            out[p] += d
        cur = tuple(out)
        yield cur


def fire_sequence(net: PetriNet, marking: Marking, seq: FiringSequence):
    """Replay an enabled sequence; returns (final, chain incl. both endpoints)."""
    chain = [tuple(marking)]
    chain.extend(replay(net, marking, seq))
    return chain[-1], chain


def is_enabled_sequence(net: PetriNet, marking: Marking, seq: FiringSequence) -> bool:
    try:
        for _ in replay(net, marking, seq):
            pass
    except NotEnabled:
        return False
    return True


def fire_relaxed(net: PetriNet, marking: Marking, seq: FiringSequence, q: Iterable):
    """Apply the update rule unconditionally, tracking where places in ``q``
    go negative.

    Returns (final, chain, violation) where violation is the 1-based index of
    the first step after which some place of ``q`` is negative (0 if the
    start marking already is), or None.  Callers decide whether a violation
    is an error.
    """
    qset = set(q)
    chain = [tuple(marking)]
    violation = None
    if any(marking[p] < 0 for p in qset):
        violation = 0
    cur = list(marking)
    for i, t in enumerate(seq):
        for p, d in net._delta[t]:
            cur[p] += d
        chain.append(tuple(cur))
        if violation is None and any(cur[p] < 0 for p in qset):
            violation = i + 1
    return chain[-1], chain, violation


def effect(net: PetriNet, seq: FiringSequence, p: int) -> int:
    """Total signed token change of the sequence on one place."""
    return sum(net.post[p][t] - net.pre[p][t] for t in seq)


def sequence_effects(net: PetriNet, seq: FiringSequence) -> tuple:
    out = [0] * net.num_places
    for t in seq:
        for p, d in net._delta[t]:
            out[p] += d
    return tuple(out)


def _bits(x: int) -> int:
    # ceil(log2(x+1)), floored to 1 bit so zero-valued fields still count
    return max(1, int(x).bit_length())


def net_size(net: PetriNet, m0: Marking) -> int:
    """Size of the encoded net in bits: 2*m*n*bits(max weight) + m*bits(max initial)."""
    m, n = net.num_places, net.num_transitions
    return 2 * m * n * _bits(net.max_weight) + m * _bits(max(m0) if m0 else 0)


# ---------------------------------------------------------------------------
# text format
#
#   net <name>
#   places p1 p2 p3
#   transition t1
#     in  p1:1
#     out p2:1 p3:1
#   marking p1:1
#
# `#` starts a comment; weights/tokens are `place:nat` with nat >= 1 and
# omitted places get weight 0 / zero tokens.

def _parse_weight_items(parts, known_places, lineno, what):
    items = {}
    for part in parts:
        if ":" not in part:
            raise ParseError(f"expected place:count, got {part!r}", lineno)
        name, _, raw = part.partition(":")
        if name not in known_places:
            raise ParseError(f"{what} references unknown place {name!r}", lineno)
        try:
            w = int(raw)
        except ValueError:
            raise ParseError(f"bad count {raw!r} for place {name!r}", lineno) from None
        if w < 0:
            raise ParseError(f"negative weight {w} for place {name!r}", lineno)
        if w == 0:
            raise ParseError(
                f"explicit zero weight for place {name!r} (omit the entry instead)", lineno)
        if name in items:
            raise ParseError(f"duplicate entry for place {name!r}", lineno)
        items[name] = w
    return items


def parse_net(text: str):
    """Parse the line-oriented net format; returns (PetriNet, initial marking)."""
    name = "net"
    places = None
    transitions = []  # (name, {in}, {out})
    marking_items = None
    cur = None  # index into transitions while parsing a transition block

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        if head == "net":
            if len(rest) != 1:
                raise ParseError("net line expects exactly one name", lineno)
            name = rest[0]
        elif head == "places":
            if places is not None:
                raise ParseError("duplicate places line", lineno)
            if not rest:
                raise ParseError("net must declare at least one place", lineno)
            if len(set(rest)) != len(rest):
                raise ParseError("duplicate place identifier", lineno)
            places = list(rest)
        elif head == "transition":
            if places is None:
                raise ParseError("transition before places line", lineno)
            if len(rest) != 1:
                raise ParseError("transition line expects exactly one name", lineno)
            tname = rest[0]
            if any(t[0] == tname for t in transitions):
                raise ParseError(f"duplicate transition identifier {tname!r}", lineno)
            transitions.append((tname, {}, {}))
            cur = len(transitions) - 1
        elif head in ("in", "out"):
            if cur is None:
                raise ParseError(f"{head} line outside a transition block", lineno)
            items = _parse_weight_items(rest, set(places), lineno, f"transition arc")
            slot = transitions[cur][1 if head == "in" else 2]
            for k, v in items.items():
                if k in slot:
                    raise ParseError(f"duplicate entry for place {k!r}", lineno)
                slot[k] = v
        elif head == "marking":
            if places is None:
                raise ParseError("marking before places line", lineno)
            if marking_items is not None:
                raise ParseError("duplicate marking line", lineno)
            marking_items = _parse_weight_items(rest, set(places), lineno, "marking")
        else:
            raise ParseError(f"unknown directive {head!r}", lineno)

    if places is None:
        raise ParseError("net must declare at least one place")
    m, n = len(places), len(transitions)
    pidx = {p: i for i, p in enumerate(places)}
    pre = [[0] * n for _ in range(m)]
    post = [[0] * n for _ in range(m)]
    for j, (_, ins, outs) in enumerate(transitions):
        for p, w in ins.items():
            pre[pidx[p]][j] = w
        for p, w in outs.items():
            post[pidx[p]][j] = w
    net = PetriNet(name, places, [t[0] for t in transitions], pre, post)
    m0 = marking_from_map(net, marking_items or {})
    return net, m0


def serialize_net(net: PetriNet, m0: Marking) -> str:
    lines = [f"net {net.name}", "places " + " ".join(net.places)]
    for t in range(net.num_transitions):
        lines.append(f"transition {net.transitions[t]}")
        ins = [(net.places[p], net.pre[p][t]) for p in range(net.num_places) if net.pre[p][t]]
        outs = [(net.places[p], net.post[p][t]) for p in range(net.num_places) if net.post[p][t]]
        if ins:
            lines.append("  in  " + " ".join(f"{p}:{w}" for p, w in ins))
        if outs:
            lines.append("  out " + " ".join(f"{p}:{w}" for p, w in outs))
    entries = [(net.places[p], m0[p]) for p in range(net.num_places) if m0[p]]
    if entries:
        lines.append("marking " + " ".join(f"{p}:{w}" for p, w in entries))
    return "\n".join(lines) + "\n"


def net_to_json(net: PetriNet, m0: Marking) -> dict:
    return {
        "name": net.name,
        "places": list(net.places),
        "transitions": [
            {
                "name": net.transitions[t],
                "in": {net.places[p]: net.pre[p][t]
                       for p in range(net.num_places) if net.pre[p][t]},
                "out": {net.places[p]: net.post[p][t]
                        for p in range(net.num_places) if net.post[p][t]},
            }
            for t in range(net.num_transitions)
        ],
        "marking": marking_to_map(net, m0),
    }


def net_from_json(obj: dict):
    places = list(obj["places"])
    if not places:
        raise NetError("net must declare at least one place")
    pidx = {p: i for i, p in enumerate(places)}
    names, m, n = [], len(places), len(obj.get("transitions", []))
    pre = [[0] * n for _ in range(m)]
    post = [[0] * n for _ in range(m)]
    for j, tr in enumerate(obj.get("transitions", [])):
        names.append(tr["name"])
        for mat, key in ((pre, "in"), (post, "out")):
            for p, w in tr.get(key, {}).items():
                if p not in pidx:
                    raise NetError(f"transition {tr['name']!r} references unknown place {p!r}")
                if int(w) < 1:
                    raise NetError(f"weight for place {p!r} must be >= 1")
                mat[pidx[p]][j] = int(w)
    net = PetriNet(obj.get("name", "net"), places, names, pre, post)
    return net, marking_from_map(net, obj.get("marking", {}))
