"""Sequence-length bounds, evaluated exactly as big integers with a
materialization cap.

Three bound families are provided: covering bounds (recurrence and closed
form), self-covering bounds, and pumping bounds, plus the per-level bound
function used by the model checker.  Values beyond 2**MATERIALIZE_CAP_BITS
are carried in log2 space only; comparisons against witness lengths never
need more.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

MATERIALIZE_CAP_BITS = 4096


class DepthZero(Exception):
    """The bound function needs at least one level."""


def _log2_int(x: int) -> float:
    if x < 0:
        raise ValueError("negative value")
    if x == 0:
        return float("-inf")
    shift = max(0, x.bit_length() - 64)
    return math.log2(x >> shift) + shift


@dataclass(frozen=True)
class BoundValue:
    """Arbitrary-precision bound with a log2 estimate.

    ``exact`` is None once the value passes the materialization cap; the
    log2 field is then the only carrier (within small relative error).
    """
    exact: Optional[int]
    log2: float

    @staticmethod
    def of(x: int) -> "BoundValue":
        if x.bit_length() > MATERIALIZE_CAP_BITS:
            return BoundValue(None, _log2_int(x))
        return BoundValue(x, _log2_int(x))

    @staticmethod
    def of_log2(l2: float) -> "BoundValue":
        return BoundValue(None, l2)

    def mul(self, other: "BoundValue") -> "BoundValue":
        if self.exact is not None and other.exact is not None:
            return BoundValue.of(self.exact * other.exact)
        return BoundValue.of_log2(self.log2 + other.log2)

    def add(self, other: "BoundValue") -> "BoundValue":
        if self.exact is not None and other.exact is not None:
            return BoundValue.of(self.exact + other.exact)
        hi, lo = max(self.log2, other.log2), min(self.log2, other.log2)
        if lo == float("-inf"):
            return BoundValue.of_log2(hi)
        return BoundValue.of_log2(hi + math.log2(1.0 + 2.0 ** (lo - hi)))

    def pow(self, e: int) -> "BoundValue":
        if e < 0:
            raise ValueError("negative exponent")
        if e == 0:
            return BoundValue.of(1)
        if self.exact is not None:
            if self.exact in (0, 1):
                return BoundValue.of(self.exact)
            if e * _log2_int(self.exact) <= MATERIALIZE_CAP_BITS:
                return BoundValue.of(self.exact ** e)
        return BoundValue.of_log2(self.log2 * e)

    def le(self, other: "BoundValue", log_tol: float = 1e-9) -> bool:
        if self.exact is not None and other.exact is not None:
            return self.exact <= other.exact
        return self.log2 <= other.log2 + log_tol

    def max(self, other: "BoundValue") -> "BoundValue":
        if self.exact is not None and other.exact is not None:
            return self if self.exact >= other.exact else other
        return self if self.log2 >= other.log2 else other

    def to_json(self) -> dict:
        l2 = None if self.log2 == float("-inf") else self.log2
        return {"exact": str(self.exact) if self.exact is not None else None,
                "log2": l2}


@dataclass(frozen=True)
class BoundParams:
    """Scalar inputs shared by the bound families.

    ``r`` is the maximum of the cover target, ``u`` the maximum of the
    initial marking.  ``c_prime`` and ``d`` are the induction constants the
    source recurrences leave unpinned; they default to 2 and are reported in
    every output.  ``r_prime``/``u_prime`` may be given explicitly, else they
    derive from r/u (the self-covering and pumping contexts use slightly
    different offsets; see the accessors).
    """
    m: int
    w: int
    k_prime: int
    r: int = 0
    u: int = 0
    c_prime: int = 2
    d: int = 2
    r_prime: Optional[int] = None
    u_prime: Optional[int] = None

    @property
    def r_prime_value(self) -> int:
        if self.r_prime is not None:
            return self.r_prime
        return self.r + self.w + self.w ** 2 + self.w ** 3

    @property
    def u_prime_scs(self) -> int:
        if self.u_prime is not None:
            return self.u_prime
        return self.u + self.w + self.w ** 2 + self.w ** 3

    @property
    def u_prime_pump(self) -> int:
        if self.u_prime is not None:
            return self.u_prime
        return self.u + self.w ** 2 + self.w ** 3

    @property
    def h(self) -> int:
        return self.c_prime * self.k_prime ** 3

    def to_json(self) -> dict:
        return {
            "m": self.m, "w": self.w, "k_prime": self.k_prime,
            "r": self.r, "r_prime": self.r_prime_value,
            "u": self.u, "u_prime_scs": self.u_prime_scs,
            "u_prime_pump": self.u_prime_pump, "h": self.h,
        }


# --- covering bounds -------------------------------------------------------

def cover_bound_rec(i: int, p: BoundParams) -> BoundValue:
    """Covering-length recurrence: level 0 is m*r, each further level is
    r'^m * (w*prev + r)^(level) + prev."""
    val = BoundValue.of(p.m * p.r)
    rp = BoundValue.of(p.r_prime_value)
    for lvl in range(1, i + 1):
        grown = BoundValue.of(p.w).mul(val).add(BoundValue.of(p.r))
        val = rp.pow(p.m).mul(grown.pow(lvl + 1)).add(val)
    return val


def cover_bound_closed_bv(i: int, m: int, w: int, r: BoundValue) -> BoundValue:
    """(2*m*w*r*r')^(m*(i+1)!) with r given as a BoundValue (the model
    checker feeds non-materializable values here)."""
    offset = BoundValue.of(w + w ** 2 + w ** 3)
    r_prime = r.add(offset)
    base = BoundValue.of(2 * m * w).mul(r).mul(r_prime)
    return base.pow(m * math.factorial(i + 1))


def cover_bound_closed(i: int, p: BoundParams) -> BoundValue:
    base = BoundValue.of(2 * p.m * p.w * p.r * p.r_prime_value)
    return base.pow(p.m * math.factorial(i + 1))


# --- self-covering bounds --------------------------------------------------

def _floor_base(x: int) -> int:
    # the token-cap bases are clamped to >= 1: a zero base would make the
    # bounds vacuous while a one-transition witness can still exist
    return max(1, x)


def scs_bound(i: int, j: int, p: BoundParams):
    """Self-covering length bound; returns (recurrence, closed form).

    The closed form assumes h >= 2 and is None (not applicable) below that.
    """
    u_prime = p.u_prime_scs

    def rec(level: int, jj: int) -> BoundValue:
        if level == 0:
            return BoundValue.of(_floor_base(u_prime + jj * p.w)).pow(p.m ** p.d)
        inner = rec(level - 1, jj + 1)
        head = BoundValue.of(8 * p.k_prime)
        mid = BoundValue.of(2 * p.w).mul(inner).pow(p.h)
        tail = BoundValue.of(_floor_base(u_prime + jj * p.w) * p.w).pow(
            p.c_prime * p.m ** 4)
        return head.mul(mid).mul(tail)

    recurrence = rec(i, j)
    if p.h < 2:
        return recurrence, None
    hi = p.h ** i
    poly1 = (p.h + p.c_prime * p.m ** 4) * (hi - 1)
    poly2 = hi * p.m ** p.d + p.c_prime * p.m ** 4 * (hi - 1)
    closed = (
        BoundValue.of(8 * p.k_prime).pow((1 + p.h) ** i)
        .mul(BoundValue.of(2 * p.w).pow(poly1))
        .mul(BoundValue.of(_floor_base(u_prime + (j + i) * p.w)).pow(poly2))
    )
    return recurrence, closed


# --- pumping bounds --------------------------------------------------------

def pump_bound(i: int, j: int, p: BoundParams):
    """Pumping-sequence length bound; returns (recurrence, closed form)."""
    u_prime = p.u_prime_pump

    def rec(level: int, jj: int) -> BoundValue:
        cap = BoundValue.of(_floor_base(u_prime + jj * p.w))
        tail = cap.mul(BoundValue.of(p.w)).pow(p.c_prime * p.m ** 4)
        if level == 0:
            return BoundValue.of(8 * p.m * p.k_prime).mul(
                BoundValue.of(2).mul(cap).mul(BoundValue.of(p.w)).pow(
                    p.c_prime * p.m ** 4))
        inner = rec(level - 1, jj + 1)
        head = BoundValue.of(10 * p.m * p.k_prime)
        mid = BoundValue.of(2 * p.w).mul(inner).pow(p.h)
        return head.mul(mid).mul(tail)

    recurrence = rec(i, j)
    if p.h < 2:
        return recurrence, None
    hi = p.h ** i
    cm4 = p.c_prime * p.m ** 4
    poly1 = hi * cm4 + (p.h + cm4) * (hi - 1)
    poly2 = hi * cm4 + cm4 * (hi - 1)
    closed = (
        BoundValue.of(10 * p.m * p.k_prime).pow((1 + p.h) ** i)
        .mul(BoundValue.of(2 * p.w).pow(poly1))
        .mul(BoundValue.of(_floor_base(u_prime + (j + i) * p.w)).pow(poly2))
    )
    return recurrence, closed


# --- bound function for the EF logic ----------------------------------------

def ef_bound_fn(depth: int, ratios: Sequence[int], p: BoundParams,
                initial: Sequence[int]) -> List[List[BoundValue]]:
    """Per-level, per-place caps on witness markings for nested EF checking.

    Level depth-1 is the top ratio; every level below adds the tokens a
    length-capped covering run could consume; level 0 is the initial
    marking itself.  ``ratios[i]`` is the maximal atom ratio at level i.
    """
    if depth < 1:
        raise DepthZero("bound function needs depth >= 1")
    if len(ratios) < depth:
        raise ValueError("need one ratio per level")
    num_places = len(initial)
    levels: List[Optional[List[BoundValue]]] = [None] * depth
    levels[0] = [BoundValue.of(int(v)) for v in initial]
    if depth == 1:
        return levels  # type: ignore[return-value]
    levels[depth - 1] = [BoundValue.of(ratios[depth - 1])] * num_places
    for lvl in range(depth - 2, 0, -1):
        above = levels[lvl + 1]
        r_above = above[0]
        for bv in above[1:]:
            r_above = r_above.max(bv)
        ell = cover_bound_closed_bv(p.k_prime, p.m, p.w, r_above)
        w_ell = BoundValue.of(p.w).mul(ell)
        ratio_bv = BoundValue.of(ratios[lvl])
        levels[lvl] = [ratio_bv.max(w_ell.add(above[q])) for q in range(num_places)]
    return levels  # type: ignore[return-value]


def level_cap(levels: List[List[BoundValue]], lvl: int, p: BoundParams) -> BoundValue:
    """Search-depth cap for an edge into the given level: the covering bound
    instantiated with that level's largest per-place value."""
    vals = levels[lvl]
    r = vals[0]
    for bv in vals[1:]:
        r = r.max(bv)
    return cover_bound_closed_bv(p.k_prime, p.m, p.w, r)
