"""Event-sourced field sessions.

A session carries one sequential design campaign for a human (or a
simulator standing in for one).  Every state change is appended to a
JSONL event log; the visible state is a pure fold over those events, so
replaying a log reproduces the exact snapshot and the log is the only
source of truth.  Event types: created, recommended, observed,
terminated.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, replace
from pathlib import Path

from .bayes import prediction_band, posterior_summary
from .growth import Dataset
from .jsonio import canonical_dumps, jsonl_append, jsonl_read
from .optimize import (
    STATUS_BUDGET,
    STATUS_SEASON,
    DataSource,
    SeqConfig,
    candidate_window,
    fit_step,
    score_window,
)
from .criteria import argmin_day

SCHEMA_VERSION = 1

AWAITING_RECOMMENDATION = "awaiting-recommendation"
AWAITING_OBSERVATION = "awaiting-observation"
TERMINAL_STATUSES = (STATUS_BUDGET, STATUS_SEASON)


class SessionError(Exception):
    """Base class for session failures."""


class SessionNotFound(SessionError):
    pass


class SessionStateError(SessionError):
    """Operation not valid in the session's current status."""


class SessionValidationError(SessionError):
    """Payload is well-formed but semantically wrong."""


@dataclass(frozen=True)
class Recommendation:
    step: int
    window: tuple[int, ...]
    scores: tuple[float, ...]
    day: int
    posterior: dict
    band: dict
    terminal_draw: tuple[float, float]

    def to_dict(self) -> dict:
        return {
            "step": self.step,
            "window": list(self.window),
            "scores": list(self.scores),
            "day": self.day,
            "posterior_summary": self.posterior,
            "band": self.band,
            "terminal_draw": list(self.terminal_draw),
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "Recommendation":
        return cls(
            step=payload["step"],
            window=tuple(payload["window"]),
            scores=tuple(payload["scores"]),
            day=payload["day"],
            posterior=payload["posterior_summary"],
            band=payload["band"],
            terminal_draw=tuple(payload["terminal_draw"]),
        )


@dataclass(frozen=True)
class SessionState:
    """Derived snapshot; everything here is a fold over the event log."""

    session_id: str
    cfg: SeqConfig
    seed: int
    observations: tuple[tuple[int, int], ...]
    recommendations: tuple[Recommendation, ...]
    status: str
    pending: Recommendation | None

    def dataset(self) -> Dataset:
        return Dataset.from_pairs(self.observations)

    def design_days(self) -> tuple[int, ...]:
        return tuple(day for day, _ in self.observations)

    def last_terminal_draw(self) -> tuple[float, float] | None:
        if not self.recommendations:
            return None
        return self.recommendations[-1].terminal_draw

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "session_id": self.session_id,
            "cfg": self.cfg.to_dict(),
            "seed": self.seed,
            "observations": [{"day": d, "count": c} for d, c in self.observations],
            "recommendations": [rec.to_dict() for rec in self.recommendations],
            "status": self.status,
            "pending": self.pending.to_dict() if self.pending else None,
        }

    def snapshot_bytes(self) -> bytes:
        return (canonical_dumps(self.to_dict()) + "\n").encode()


def _fold(events: list[dict]) -> SessionState:
    """Rebuild the snapshot from an ordered event list. Pure."""
    if not events or events[0]["type"] != "created":
        raise SessionValidationError("event log must begin with a created event")
    head = events[0]
    state = SessionState(
        session_id=head["session_id"],
        cfg=SeqConfig.from_dict(head["cfg"]),
        seed=head["seed"],
        observations=tuple((o["day"], o["count"]) for o in head["initial_observations"]),
        recommendations=(),
        status=AWAITING_RECOMMENDATION,
        pending=None,
    )
    for ev in events[1:]:
        kind = ev["type"]
        if kind == "recommended":
            rec = Recommendation.from_dict(ev["recommendation"])
            state = replace(
                state,
                recommendations=state.recommendations + (rec,),
                pending=rec,
                status=AWAITING_OBSERVATION,
            )
        elif kind == "observed":
            state = replace(
                state,
                observations=state.observations + ((ev["day"], ev["count"]),),
                pending=None,
                status=AWAITING_RECOMMENDATION,
            )
        elif kind == "terminated":
            state = replace(state, status=ev["reason"], pending=None)
        else:
            raise SessionValidationError(f"unknown event type {kind!r}")
    return state


class SessionStore:
    """Append-only JSONL persistence, one log per session.

    Mutations are serialized per session with a lock; reads return the
    folded snapshot.  A snapshot file is also materialized next to each
    log for quick inspection, but the log stays authoritative.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def _lock_for(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            if session_id not in self._locks:
                self._locks[session_id] = threading.Lock()
            return self._locks[session_id]

    def log_path(self, session_id: str) -> Path:
        return self.root / f"{session_id}.jsonl"

    def snapshot_path(self, session_id: str) -> Path:
        return self.root / f"{session_id}.snapshot.json"

    def exists(self, session_id: str) -> bool:
        return self.log_path(session_id).exists()

    def session_ids(self) -> list[str]:
        return sorted(p.stem for p in self.root.glob("*.jsonl"))

    def next_id(self) -> str:
        return f"s{len(self.session_ids()) + 1:04d}"

    def append(self, session_id: str, event: dict) -> None:
        event = {"schema_version": SCHEMA_VERSION, **event}
        jsonl_append(self.log_path(session_id), event)

    def events(self, session_id: str) -> list[dict]:
        if not self.exists(session_id):
            raise SessionNotFound(f"no session {session_id!r}")
        return jsonl_read(self.log_path(session_id))

    def load(self, session_id: str) -> SessionState:
        return _fold(self.events(session_id))

    def write_snapshot(self, state: SessionState) -> None:
        self.snapshot_path(state.session_id).write_bytes(state.snapshot_bytes())


def create_session(
    store: SessionStore,
    cfg: SeqConfig,
    seed: int,
    initial_observations: list[tuple[int, int]],
    session_id: str | None = None,
) -> SessionState:
    """Open a session from the already-observed initial design."""
    if len(initial_observations) != len(cfg.initial_days):
        raise SessionValidationError(
            f"expected {len(cfg.initial_days)} initial observations, "
            f"got {len(initial_observations)}"
        )
    try:
        data = Dataset.from_pairs(initial_observations)
    except ValueError as exc:
        raise SessionValidationError(str(exc)) from exc
    if data.last_day() > cfg.season:
        raise SessionValidationError("initial observations must lie within the season")
    sid = session_id or store.next_id()
    if store.exists(sid):
        raise SessionValidationError(f"session {sid!r} already exists")
    with store._lock_for(sid):
        store.append(
            sid,
            {
                "type": "created",
                "session_id": sid,
                "cfg": cfg.to_dict(),
                "seed": seed,
                "initial_observations": [
                    {"day": d, "count": c} for d, c in initial_observations
                ],
            },
        )
        state = store.load(sid)
        store.write_snapshot(state)
    return state


def _terminate(store: SessionStore, state: SessionState, reason: str) -> SessionState:
    store.append(state.session_id, {"type": "terminated", "reason": reason})
    out = store.load(state.session_id)
    store.write_snapshot(out)
    return out


def recommend_next(store: SessionStore, session_id: str) -> SessionState:
    """Fit, score the next window, and record the recommended day.

    Idempotent while an observation is outstanding: repeat calls return
    the stored recommendation without advancing the chain.  On a
    finished session the terminal state comes back unchanged.
    """
    with store._lock_for(session_id):
        state = store.load(session_id)
        if state.status in TERMINAL_STATUSES or state.status == AWAITING_OBSERVATION:
            return state
        data = state.dataset()
        if len(data) >= state.cfg.budget:
            return _terminate(store, state, STATUS_BUDGET)
        if data.last_day() >= state.cfg.season:
            return _terminate(store, state, STATUS_SEASON)

        step_index = len(data)
        post = fit_step(data, state.cfg, state.seed, step_index, state.last_terminal_draw())
        window = candidate_window(data.last_day(), state.cfg.window, state.cfg.season)
        scores = score_window(post, data, state.cfg, window, state.seed, step_index)
        day = argmin_day(window, scores)
        band = prediction_band(
            post, range(1, state.cfg.season + 1), state.cfg.n0, mode="mean-curve"
        )
        rec = Recommendation(
            step=step_index,
            window=window,
            scores=tuple(float(s) for s in scores),
            day=day,
            posterior=posterior_summary(post),
            band=band.to_dict(),
            terminal_draw=post.last_draw(),
        )
        store.append(session_id, {"type": "recommended", "recommendation": rec.to_dict()})
        out = store.load(session_id)
        store.write_snapshot(out)
        return out


def add_observation(
    store: SessionStore,
    session_id: str,
    day: int,
    count: int,
    override: bool = False,
) -> SessionState:
    """Record the count observed at a day and advance the state machine.

    The day must follow every existing observation.  A day other than
    the recommended one needs override=True and is logged as such.
    """
    with store._lock_for(session_id):
        state = store.load(session_id)
        if state.status in TERMINAL_STATUSES:
            raise SessionStateError(f"session is {state.status}")
        if state.status != AWAITING_OBSERVATION or state.pending is None:
            raise SessionStateError("no recommendation is outstanding")
        if day != int(day) or day < 1:
            raise SessionValidationError(f"day must be a positive integer, got {day!r}")
        if count != int(count) or count < 0:
            raise SessionValidationError(f"count must be a non-negative integer, got {count!r}")
        data = state.dataset()
        if day <= data.last_day():
            raise SessionValidationError(
                f"day {day} does not follow the last observed day {data.last_day()}"
            )
        if day > state.cfg.season:
            raise SessionValidationError(f"day {day} is outside the {state.cfg.season}-day season")
        if day != state.pending.day and not override:
            raise SessionValidationError(
                f"day {day} differs from the recommended day {state.pending.day}; "
                "set override to record it anyway"
            )
        store.append(
            session_id,
            {
                "type": "observed",
                "day": int(day),
                "count": int(count),
                "override": bool(day != state.pending.day),
                "recommended_day": state.pending.day,
            },
        )
        state = store.load(session_id)
        if len(state.observations) >= state.cfg.budget:
            return _terminate(store, state, STATUS_BUDGET)
        if day >= state.cfg.season:
            return _terminate(store, state, STATUS_SEASON)
        store.write_snapshot(state)
        return state


def replay(log_path: str | Path) -> SessionState:
    """Rebuild a snapshot from a log alone; no chains are re-run."""
    return _fold(jsonl_read(log_path))


def drive_with_source(
    store: SessionStore,
    cfg: SeqConfig,
    seed: int,
    source: DataSource,
    session_id: str | None = None,
) -> SessionState:
    """Run a whole session with a data source answering every request.

    Equivalent to the direct sequential optimizer: same fits, same
    scores, same design, with every exchange logged as events.
    """
    initial = [(d, source.count(d)) for d in cfg.initial_days]
    state = create_session(store, cfg, seed, initial, session_id)
    while True:
        state = recommend_next(store, state.session_id)
        if state.status in TERMINAL_STATUSES:
            return state
        assert state.pending is not None
        day = state.pending.day
        state = add_observation(store, state.session_id, day, source.count(day))
        if state.status in TERMINAL_STATUSES:
            return state
