"""FastAPI application exposing the analysis endpoints.

Run with: uvicorn pnvc.service.app:app
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from ..net import NetError
from . import handlers
from .models import (
    AnalyzeRequest, AnalyzeResponse, BoundedRequest, BoundedResponse,
    BoundsRequest, BoundsResponse, CoverRequest, CoverResponse, GenRequest,
    GenResponse, McRequest, McResponse, NetSource, ParseResponse,
    PropcheckRequest, PropcheckResponse,
)

app = FastAPI(title="pnvc", description="Petri net coverability/boundedness analysis")


def _run(handler, req):
    try:
        return handler(req)
    except NetError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


@app.get("/health")
def health():
    return {"status": "ok"}


@app.post("/parse", response_model=ParseResponse)
def parse(req: NetSource):
    return _run(handlers.handle_parse, req)


@app.post("/analyze", response_model=AnalyzeResponse)
def analyze(req: AnalyzeRequest):
    return _run(handlers.handle_analyze, req)


@app.post("/bounds", response_model=BoundsResponse)
def bounds(req: BoundsRequest):
    return _run(handlers.handle_bounds, req)


@app.post("/cover", response_model=CoverResponse)
def cover(req: CoverRequest):
    return _run(handlers.handle_cover, req)


@app.post("/bounded", response_model=BoundedResponse)
def bounded(req: BoundedRequest):
    return _run(handlers.handle_bounded, req)


@app.post("/mc", response_model=McResponse)
def mc(req: McRequest):
    return _run(handlers.handle_mc, req)


@app.post("/gen", response_model=GenResponse)
def gen(req: GenRequest):
    return _run(handlers.handle_gen, req)


@app.post("/propcheck", response_model=PropcheckResponse)
def propcheck(req: PropcheckRequest):
    return _run(handlers.handle_propcheck, req)
