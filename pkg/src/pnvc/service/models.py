"""Pydantic request/response models for the analysis service.

Nets travel either as the text format or the JSON mirror; every response
is JSON-stable (sorted keys downstream) so identical requests produce
byte-identical reports.
"""

from __future__ import annotations

from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class TransitionJson(BaseModel):
    model_config = ConfigDict(populate_by_name=True)
    name: str
    in_: Dict[str, int] = Field(default_factory=dict, alias="in")
    out: Dict[str, int] = Field(default_factory=dict)


class NetJson(BaseModel):
    name: str = "net"
    places: List[str]
    transitions: List[TransitionJson] = Field(default_factory=list)
    marking: Dict[str, int] = Field(default_factory=dict)


class NetSource(BaseModel):
    """Exactly one of ``net_text`` / ``net`` must be provided."""
    net_text: Optional[str] = None
    net: Optional[NetJson] = None

    @model_validator(mode="after")
    def _one_source(self):
        if (self.net_text is None) == (self.net is None):
            raise ValueError("provide exactly one of net_text or net")
        return self


class ParseResponse(BaseModel):
    net: NetJson
    size_bits: int
    num_places: int
    num_transitions: int
    max_weight: int


class AnalyzeRequest(NetSource):
    approx: bool = False
    budget: Optional[int] = None


class AnalyzeResponse(BaseModel):
    k: int
    k_prime: int
    cover: List[str]
    cover_exact: bool
    num_types: int
    varieties: Dict[str, int]
    special: List[str]
    independent: List[str]


class BoundValueJson(BaseModel):
    exact: Optional[str] = None
    log2: Optional[float] = None


class BoundRecordJson(BaseModel):
    """One bound family: the closed form under `exact`/`log2`, the
    recurrence alongside, and the indices it was evaluated at."""
    i: int
    j: Optional[int] = None
    exact: Optional[str] = None
    log2: Optional[float] = None
    recurrence: Optional[BoundValueJson] = None
    closed_applicable: bool = True


class BoundsRequest(NetSource):
    net_text: Optional[str] = None
    net: Optional[NetJson] = None
    target: Dict[str, int] = Field(default_factory=dict)
    i: Optional[int] = None  # defaults to k'
    j: int = 1
    c_prime: int = 2
    d: int = 2
    u_prime: Optional[int] = None

    @model_validator(mode="after")
    def _one_source(self):  # net optional here: raw params may be given instead
        if self.net_text is not None and self.net is not None:
            raise ValueError("provide at most one of net_text or net")
        return self

    m: Optional[int] = None
    w: Optional[int] = None
    k_prime: Optional[int] = None
    r: Optional[int] = None
    u: Optional[int] = None


class BoundsResponse(BaseModel):
    params: dict
    cover_bound: BoundRecordJson
    scs_bound: BoundRecordJson
    pump_bound: BoundRecordJson
    constants: dict


class CoverRequest(NetSource):
    target: Dict[str, int]
    method: str = "both"  # both | forward | backward
    max_len: int = 10_000
    state_cap: int = 1_000_000
    node_cap: int = 100_000


class CoverResponse(BaseModel):
    verdict: str
    witness: Optional[List[str]] = None
    method: str
    stats: dict = Field(default_factory=dict)
    decided: bool


class BoundedRequest(NetSource):
    method: str = "both"  # both | karp-miller | self-covering
    scs_max_len: int = 12
    node_cap: int = 100_000


class BoundedResponse(BaseModel):
    verdict: str
    evidence: Optional[dict] = None
    method: str
    stats: dict = Field(default_factory=dict)
    decided: bool


class McRequest(NetSource):
    formula: str
    max_depth: int = 6
    node_cap: int = 100_000
    fallback_depth: int = 10_000


class McResponse(BaseModel):
    formula: str
    verdict: str  # true | false | inconclusive
    evidence: Optional[dict] = None


class GenRequest(BaseModel):
    places: int
    transitions: int
    max_weight: int = 1
    max_initial: int = 1
    target_vc: Optional[int] = None
    seed: int = 0


class GenResponse(BaseModel):
    net_text: str
    net: NetJson
    planted_cover_valid: Optional[bool] = None


class PropcheckRequest(BaseModel):
    suites: Optional[List[str]] = None
    trials: int = 200
    seed: int = 0


class PropcheckResponse(BaseModel):
    seed: int
    trials: int
    suites: List[dict]
    ok: bool
