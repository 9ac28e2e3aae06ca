"""HTTP facade over sessions and scenario replication.

Thin by design: handlers validate, call the session or optimizer layer,
and serialize.  Responses are canonical JSON (sorted keys, repr floats)
so that a given persisted state, request and seed always produce the
same bytes.  Every non-2xx body is an ApiError object with code,
message and optional details.
"""
from __future__ import annotations

import os
import queue
import threading
from concurrent.futures import Future, ThreadPoolExecutor
from concurrent.futures import TimeoutError as FutureTimeout
from pathlib import Path
from typing import Literal

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import StreamingResponse
from pydantic import BaseModel, ConfigDict, Field

from .bayes import MHConfig, PriorSpec
from .criteria import Criterion
from .growth import DEFAULT_SEASON, DEFAULT_START, SCENARIOS
from .jsonio import canonical_dumps
from .optimize import SeqConfig, replicate_scenario
from .session import (
    SessionNotFound,
    SessionStateError,
    SessionStore,
    SessionValidationError,
    TERMINAL_STATUSES,
    add_observation,
    create_session,
    recommend_next,
)

ENV_ADDR = "SEQDES_ADDR"
ENV_DATA_DIR = "SEQDES_DATA_DIR"
DEFAULT_LATENCY_BUDGET = 2.0


class CanonicalResponse(Response):
    media_type = "application/json"

    def render(self, content) -> bytes:
        return (canonical_dumps(content) + "\n").encode()


def api_error(status: int, code: str, message: str, details: dict | None = None) -> CanonicalResponse:
    body = {"code": code, "message": message}
    if details:
        body["details"] = details
    return CanonicalResponse(content=body, status_code=status)


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class PriorsBody(StrictModel):
    r_mean: float = 1.0
    r_var: float = 10.0
    k_mean: float = 2000.0
    k_var: float = 0.1
    parameterization: str = "mean-var"

    def to_spec(self) -> PriorSpec:
        return PriorSpec(**self.model_dump())


class MhBody(StrictModel):
    kept: int = 10_000
    burn_in: int = 2_000
    thin: int = 1

    def to_config(self) -> MHConfig:
        return MHConfig(**self.model_dump())


class CriterionBody(StrictModel):
    kind: str = "I"
    draws: int = 200
    refit: str = "importance"

    def to_criterion(self) -> Criterion:
        return Criterion(kind=self.kind, draws=self.draws, refit=self.refit)


class ObservationBody(StrictModel):
    day: int
    count: int


class CreateSessionBody(StrictModel):
    seed: int = Field(ge=0)
    initial_observations: list[ObservationBody]
    initial_days: list[int] | None = None
    budget: int = 10
    window: int = 10
    season: int = DEFAULT_SEASON
    n0: float = DEFAULT_START
    criterion: CriterionBody = Field(default_factory=CriterionBody)
    priors: PriorsBody = Field(default_factory=PriorsBody)
    mh: MhBody = Field(default_factory=MhBody)
    session_id: str | None = None


class AddObservationBody(StrictModel):
    day: int
    count: int
    override: bool = False


class ReplicateBody(StrictModel):
    scenario: str
    criterion: str
    mode: Literal["sequential", "anneal"]
    seed: int = Field(ge=0)
    budget: int = 10
    window: int = 10
    season: int = DEFAULT_SEASON
    n0: float = DEFAULT_START
    priors: PriorsBody = Field(default_factory=PriorsBody)
    mh: MhBody = Field(default_factory=MhBody)


def create_app(
    data_dir: str | Path | None = None,
    latency_budget: float = DEFAULT_LATENCY_BUDGET,
) -> FastAPI:
    root = Path(data_dir or os.environ.get(ENV_DATA_DIR, "./seqdes-data"))
    store = SessionStore(root)
    app = FastAPI(title="seqdes", version="0.1.0")
    # the browser dashboard is served as static files from whatever origin
    # is convenient, so the API must answer cross-origin requests
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.store = store
    app.state.latency_budget = latency_budget
    executor = ThreadPoolExecutor(max_workers=4)
    inflight: dict[str, Future] = {}

    @app.exception_handler(RequestValidationError)
    async def malformed(request: Request, exc: RequestValidationError):
        return api_error(400, "invalid-request", "request body failed validation",
                         {"errors": [str(e["msg"]) for e in exc.errors()][:5]})

    @app.exception_handler(SessionNotFound)
    async def not_found(request: Request, exc: SessionNotFound):
        return api_error(404, "not-found", str(exc))

    @app.exception_handler(SessionStateError)
    async def wrong_state(request: Request, exc: SessionStateError):
        return api_error(409, "wrong-state", str(exc))

    @app.exception_handler(SessionValidationError)
    async def invalid_value(request: Request, exc: SessionValidationError):
        return api_error(422, "invalid-value", str(exc))

    @app.exception_handler(ValueError)
    async def domain_error(request: Request, exc: ValueError):
        return api_error(422, "invalid-value", str(exc))

    @app.exception_handler(Exception)
    async def internal_error(request: Request, exc: Exception):
        return api_error(500, "internal", f"{type(exc).__name__}: {exc}")

    @app.post("/sessions", status_code=201)
    def post_session(body: CreateSessionBody) -> CanonicalResponse:
        initial_days = tuple(body.initial_days) if body.initial_days else tuple(
            o.day for o in body.initial_observations
        )
        cfg = SeqConfig(
            initial_days=initial_days,
            budget=body.budget,
            window=body.window,
            season=body.season,
            criterion=body.criterion.to_criterion(),
            mh=body.mh.to_config(),
            priors=body.priors.to_spec(),
            n0=body.n0,
        )
        state = create_session(
            store,
            cfg,
            body.seed,
            [(o.day, o.count) for o in body.initial_observations],
            session_id=body.session_id,
        )
        resp = CanonicalResponse(content=state.to_dict(), status_code=201)
        resp.headers["Location"] = f"/sessions/{state.session_id}"
        return resp

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str) -> CanonicalResponse:
        return CanonicalResponse(content=store.load(session_id).to_dict())

    @app.post("/sessions/{session_id}/recommend")
    def post_recommend(session_id: str) -> CanonicalResponse:
        if not store.exists(session_id):
            raise SessionNotFound(f"no session {session_id!r}")
        state = store.load(session_id)
        if state.status in TERMINAL_STATUSES:
            return CanonicalResponse(content=recommend_next(store, session_id).to_dict())
        if state.pending is not None:
            # the library call would be a no-op here; over HTTP a stray
            # re-post is a client error, not a silent replay
            raise SessionStateError(
                "a recommendation is already pending; add an observation first"
            )
        fut = inflight.get(session_id)
        if fut is None or fut.done():
            fut = executor.submit(recommend_next, store, session_id)
            inflight[session_id] = fut
        try:
            state = fut.result(timeout=app.state.latency_budget)
            inflight.pop(session_id, None)
            return CanonicalResponse(content=state.to_dict())
        except (FutureTimeout, TimeoutError):
            return CanonicalResponse(
                content={
                    "status": "pending",
                    "poll": f"/sessions/{session_id}/recommendation",
                },
                status_code=202,
            )

    @app.get("/sessions/{session_id}/recommendation")
    def get_recommendation(session_id: str) -> CanonicalResponse:
        if not store.exists(session_id):
            raise SessionNotFound(f"no session {session_id!r}")
        fut = inflight.get(session_id)
        if fut is not None and not fut.done():
            return CanonicalResponse(
                content={
                    "status": "pending",
                    "poll": f"/sessions/{session_id}/recommendation",
                },
                status_code=202,
            )
        inflight.pop(session_id, None)
        if fut is not None:
            fut.result()  # surface worker exceptions
        state = store.load(session_id)
        if state.pending is None and state.status not in TERMINAL_STATUSES:
            raise SessionStateError("no recommendation has been computed yet")
        return CanonicalResponse(content=state.to_dict())

    @app.post("/sessions/{session_id}/observations")
    def post_observation(session_id: str, body: AddObservationBody) -> CanonicalResponse:
        state = add_observation(store, session_id, body.day, body.count, body.override)
        return CanonicalResponse(content=state.to_dict())

    @app.get("/sessions/{session_id}/band")
    def get_band(session_id: str) -> CanonicalResponse:
        state = store.load(session_id)
        recs = state.recommendations
        if not recs:
            raise SessionStateError("no posterior has been fit yet; call recommend first")
        return CanonicalResponse(content=recs[-1].band)

    @app.post("/replicate")
    def post_replicate(body: ReplicateBody):
        if body.scenario not in SCENARIOS:
            raise SessionValidationError(
                f"unknown scenario {body.scenario!r}, expected one of {sorted(SCENARIOS)}"
            )
        criterion = Criterion(body.criterion)

        def stream():
            # progress events flow through a queue so the client sees them
            # as the run advances, not after it finishes
            q: queue.Queue = queue.Queue()
            done = object()

            def work():
                try:
                    bundle = replicate_scenario(
                        body.scenario,
                        criterion,
                        body.mode,
                        body.seed,
                        budget=body.budget,
                        window=body.window,
                        season=body.season,
                        mh=body.mh.to_config(),
                        priors=body.priors.to_spec(),
                        n0=body.n0,
                        progress=q.put,
                    )
                    q.put({"event": "bundle", "bundle": bundle.to_dict()})
                except Exception as exc:  # surfaced as a terminal stream event
                    q.put({"event": "error", "message": str(exc)})
                finally:
                    q.put(done)

            worker = threading.Thread(target=work, daemon=True)
            worker.start()
            while True:
                item = q.get()
                if item is done:
                    break
                yield canonical_dumps(item) + "\n"

        return StreamingResponse(stream(), media_type="application/x-ndjson")

    return app
