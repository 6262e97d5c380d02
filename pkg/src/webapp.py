"""FastAPI application exposing the workbench predicates as a JSON API."""

from __future__ import annotations

import time
from typing import Any, Dict, List, Optional, Tuple, Union

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from .lts import DEFAULT_MAX_BANG_UNFOLD, ExplorationBounds, explore, to_json_dict, visible_in
from .simulation import (
    IncompleteLtsError,
    distinguishing_depth,
    distinguishing_moves,
    explore_pair,
    format_moves,
    sim_k,
    sim_omega,
)
from .syntax import ParseError, parse_term, pretty
from .terms import (
    Calculus,
    CalculusProfile,
    OrderError,
    PriorityOrder,
    ProfileError,
    TermError,
    free_names,
    holes,
    is_closed,
    profile_for,
    sorted_names,
)
from .utils import int_env
from .witness import DefinitionModel, WitnessFileError, definitions_from_models, verify_witness, witness_from_dict

APP_TITLE = "Repfree Workbench API"
APP_VERSION = "1.0.0"


def _caps() -> Dict[str, int]:
    return {
        "max_states": int_env("REPFREE_API_MAX_STATES", 5000),
        "max_depth": int_env("REPFREE_API_MAX_DEPTH", 64),
    }


class BoundsRequest(BaseModel):
    max_states: Optional[int] = Field(default=None, ge=1)
    max_depth: Optional[int] = Field(default=None, ge=1)
    max_bang_unfold: Optional[int] = Field(default=None, ge=1, le=8)


class TermRequest(BaseModel):
    term: str = Field(..., description="Term in surface syntax")
    calculus: Calculus = Field(default=Calculus.CCS)
    order: List[Tuple[str, str]] = Field(default_factory=list)
    definitions: Dict[str, DefinitionModel] = Field(default_factory=dict)
    bounds: Optional[BoundsRequest] = None


class ApiResponse(BaseModel):
    ok: bool
    elapsed_ms: int
    result: Dict[str, Any]


def _clamped_bounds(requested: Optional[BoundsRequest]) -> ExplorationBounds:
    caps = _caps()
    base = ExplorationBounds.from_env()
    values = requested.model_dump() if requested else {}
    return ExplorationBounds(
        max_states=min(values.get("max_states") or base.max_states, caps["max_states"]),
        max_depth=min(values.get("max_depth") or base.max_depth, caps["max_depth"]),
        max_bang_unfold=values.get("max_bang_unfold") or base.max_bang_unfold,
    )


def _profile(payload: Union[TermRequest, "SimRequest"]) -> CalculusProfile:
    try:
        order = PriorityOrder.from_pairs(payload.order)
        definitions = definitions_from_models(payload.definitions, "definitions")
    except OrderError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    except WitnessFileError as exc:
        raise HTTPException(status_code=400, detail=exc.messages) from exc
    try:
        return profile_for(payload.calculus, order, definitions)
    except ProfileError as exc:
        raise HTTPException(status_code=400, detail=[str(v) for v in exc.violations]) from exc


def _parse(payload: TermRequest, profile: CalculusProfile):
    try:
        return parse_term(payload.term, profile)
    except ParseError as exc:
        raise HTTPException(status_code=400, detail=[d.to_dict() for d in exc.diagnostics]) from exc


def _process(payload: TermRequest):
    profile = _profile(payload)
    term = _parse(payload, profile)
    if holes(term):
        raise HTTPException(status_code=400, detail="context not a process")
    return profile, term


def _respond(started: float, result: Dict[str, Any]) -> ApiResponse:
    elapsed_ms = int((time.time() - started) * 1000)
    return ApiResponse(ok=True, elapsed_ms=elapsed_ms, result=result)


app = FastAPI(title=APP_TITLE, version=APP_VERSION)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=False,
    allow_methods=["GET", "POST", "OPTIONS"],
    allow_headers=["*"],
)


@app.get("/api/health")
def health() -> Dict[str, Any]:
    return {
        "status": "ok",
        "version": APP_VERSION,
        "calculi": [item.value for item in Calculus],
        "bounds": ExplorationBounds.from_env().to_dict(),
        "caps": dict(_caps(), max_bang_unfold=DEFAULT_MAX_BANG_UNFOLD),
    }


@app.post("/api/parse", response_model=ApiResponse)
def parse(payload: TermRequest) -> ApiResponse:
    started = time.time()
    profile = _profile(payload)
    term = _parse(payload, profile)
    result: Dict[str, Any] = {"calculus": profile.name, "pretty": pretty(term)}
    if holes(term):
        result["holes"] = sorted(holes(term))
    else:
        result["free_names"] = [str(n) for n in sorted_names(free_names(term))]
        result["closed"] = is_closed(term)
    return _respond(started, result)


@app.post("/api/visible", response_model=ApiResponse)
def visible(payload: TermRequest) -> ApiResponse:
    started = time.time()
    profile, term = _process(payload)
    lts = explore(term, profile, _clamped_bounds(payload.bounds))
    verdict = visible_in(lts)
    result = verdict.to_dict()
    result.update({"complete": lts.complete, "states": len(lts.states)})
    return _respond(started, result)


@app.post("/api/lts", response_model=ApiResponse)
def lts(payload: TermRequest) -> ApiResponse:
    started = time.time()
    profile, term = _process(payload)
    return _respond(started, to_json_dict(explore(term, profile, _clamped_bounds(payload.bounds))))


@app.post("/api/witness", response_model=ApiResponse)
def witness(payload: Dict[str, Any]) -> ApiResponse:
    started = time.time()
    try:
        case = witness_from_dict(payload, source="request")
    except WitnessFileError as exc:
        raise HTTPException(status_code=400, detail=exc.messages) from exc
    except (TermError, ProfileError) as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    caps = _caps()
    bounds = case.bounds.override(
        max_states=min(case.bounds.max_states, caps["max_states"]),
        max_depth=min(case.bounds.max_depth, caps["max_depth"]),
    )
    try:
        report = verify_witness(case, bounds)
    except WitnessFileError as exc:
        raise HTTPException(status_code=400, detail=exc.messages) from exc
    return _respond(started, report.to_dict())


class SimRequest(BaseModel):
    q: str = Field(..., description="Simulated process")
    p: str = Field(..., description="Simulating process")
    calculus: Calculus = Field(default=Calculus.CCS)
    k: Optional[int] = Field(default=None, ge=0, description="Stratum; omitted means the limit")
    order: List[Tuple[str, str]] = Field(default_factory=list)
    definitions: Dict[str, DefinitionModel] = Field(default_factory=dict)
    bounds: Optional[BoundsRequest] = None


@app.post("/api/sim", response_model=ApiResponse)
def simulation(payload: SimRequest) -> ApiResponse:
    started = time.time()
    profile = _profile(payload)
    terms = []
    for src in (payload.q, payload.p):
        term = _parse(TermRequest(term=src, calculus=payload.calculus), profile)
        if holes(term):
            raise HTTPException(status_code=400, detail="context not a process")
        terms.append(term)
    lq, lp = explore_pair(terms[0], terms[1], profile, _clamped_bounds(payload.bounds))
    try:
        relation = sim_omega(lq, lp) if payload.k is None else sim_k(lq, lp, payload.k)
    except IncompleteLtsError as exc:
        raise HTTPException(
            status_code=422,
            detail={"message": str(exc), "side": exc.side, "bounds_hit": exc.bounds_hit},
        ) from exc
    holds = relation.holds_at_roots(lq, lp)
    result: Dict[str, Any] = {
        "k": "omega" if payload.k is None else payload.k,
        "holds": holds,
        "converged_at": relation.converged_at,
    }
    if not holds:
        result["distinguishing_depth"] = distinguishing_depth(lq, lp)
        result["distinguishing_moves"] = format_moves(distinguishing_moves(lq, lp))
    return _respond(started, result)
