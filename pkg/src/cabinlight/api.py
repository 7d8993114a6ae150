"""HTTP service exposing the live control loop under /v1.

Profiles persist to a state directory; sessions are in-memory and
single-writer per profile.  A feedback POST adapts the profile, persists
it, and fans the trial out to any connected event streams.
"""

from __future__ import annotations

import json
import queue
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse, StreamingResponse
from pydantic import BaseModel, ConfigDict, Field

from . import engine as engine_mod
from .engine import ConflictingSession, CorruptProfile, UserProfile
from .fuzzy import ACTIVITY_CODES, CHRONOTYPE_CODES, InputState
from .learning import LearnerConfig

HEARTBEAT_SECONDS = 1.0


def _resolve(value, codes, what):
    """Accept a category name or its numeric code."""
    if isinstance(value, str):
        if value not in codes:
            raise HTTPException(400, f"invalid {what} {value!r}; valid: {sorted(codes)}")
        return codes[value]
    value = float(value)
    if value not in codes.values():
        raise HTTPException(400, f"invalid {what} code {value}; valid: {sorted(codes.values())}")
    return value


class ProfileRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    age: float
    chronotype: str | float
    config: dict | None = None


class InputStateBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    dgi: float
    age: float
    activity: str | float
    chronotype: str | float

    def to_state(self) -> InputState:
        return InputState(
            dgi=self.dgi, age=self.age,
            activity=_resolve(self.activity, ACTIVITY_CODES, "activity"),
            chronotype=_resolve(self.chronotype, CHRONOTYPE_CODES, "chronotype"))


class SessionRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    profile_id: str
    input_state: InputStateBody


class FeedbackRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    corrected_intensity: float = Field(ge=0.0, le=100.0)


class ContextRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    input_state: InputStateBody


@dataclass
class ApiSession:
    token: str
    session: engine_mod.SessionState
    created: float = field(default_factory=time.time)
    last_active: float = field(default_factory=time.time)
    lock: threading.Lock = field(default_factory=threading.Lock)
    streams: list = field(default_factory=list)

    def publish(self, event: dict):
        for q in list(self.streams):
            q.put(event)


def create_app(state_dir: str | Path, heartbeat: float = HEARTBEAT_SECONDS) -> FastAPI:
    state_dir = Path(state_dir)
    profile_dir = state_dir / "profiles"
    profile_dir.mkdir(parents=True, exist_ok=True)
    app = FastAPI(title="cabinlight")
    sessions: dict[str, ApiSession] = {}
    registry_lock = threading.Lock()

    def profile_path(profile_id: str) -> Path:
        return profile_dir / f"{profile_id}.json"

    def load_profile(profile_id: str) -> UserProfile:
        path = profile_path(profile_id)
        if not path.exists():
            raise HTTPException(404, f"unknown profile {profile_id}")
        try:
            return engine_mod.load_profile(path)
        except CorruptProfile as exc:
            raise HTTPException(500, f"corrupt profile: {exc}")

    def get_session(token: str) -> ApiSession:
        api_session = sessions.get(token)
        if api_session is None:
            raise HTTPException(404, f"unknown session token {token}")
        return api_session

    @app.post("/v1/profiles", status_code=201)
    def create_profile(body: ProfileRequest):
        if not 0.0 <= body.age <= 120.0:
            raise HTTPException(400, "age must lie in [0, 120]")
        chronotype = _resolve(body.chronotype, CHRONOTYPE_CODES, "chronotype")
        try:
            cfg = LearnerConfig(**(body.config or {}))
        except (TypeError, ValueError) as exc:
            raise HTTPException(400, f"bad config: {exc}")
        profile = UserProfile.fresh(age=body.age, chronotype=chronotype, cfg=cfg)
        engine_mod.save_profile(profile, profile_path(profile.profile_id))
        return {"profile_id": profile.profile_id}

    @app.post("/v1/sessions")
    def open_session(body: SessionRequest):
        profile = load_profile(body.profile_id)
        try:
            state = body.input_state.to_state()
            session = engine_mod.open_session(profile, state)
        except ConflictingSession:
            raise HTTPException(409, f"profile {body.profile_id} already in a session")
        except ValueError as exc:
            raise HTTPException(400, str(exc))
        token = uuid.uuid4().hex
        with registry_lock:
            sessions[token] = ApiSession(token=token, session=session)
        return {"token": token, "suggestion": session.last_suggestion}

    @app.post("/v1/sessions/{token}/feedback")
    def feedback(token: str, body: FeedbackRequest):
        api_session = get_session(token)
        with api_session.lock:
            session = api_session.session
            delta = engine_mod.submit_feedback(session, body.corrected_intensity)
            engine_mod.save_profile(session.profile,
                                    profile_path(session.profile.profile_id))
            record = session.trace[-1]
            api_session.last_active = time.time()
            api_session.publish({
                "type": "trial",
                "trial": record.trial,
                "suggested": record.suggested,
                "target": record.target,
                "reward": record.reward,
                "td_error": record.td_error,
                "adapted_means": record.means,
            })
            return {"reward": delta.reward, "td_error": delta.td_error,
                    "next_suggestion": session.last_suggestion}

    @app.post("/v1/sessions/{token}/context")
    def change_context(token: str, body: ContextRequest):
        api_session = get_session(token)
        with api_session.lock:
            try:
                suggestion = engine_mod.change_context(api_session.session,
                                                       body.input_state.to_state())
            except ValueError as exc:
                raise HTTPException(400, str(exc))
            api_session.last_active = time.time()
            return {"suggestion": suggestion}

    @app.get("/v1/sessions/{token}")
    def session_info(token: str):
        api_session = get_session(token)
        session = api_session.session
        return {"token": token,
                "profile_id": session.profile.profile_id,
                "suggestion": session.last_suggestion,
                "trials": len(session.trace)}

    @app.delete("/v1/sessions/{token}")
    def close_session(token: str):
        api_session = get_session(token)
        with api_session.lock:
            api_session.session.close()
            api_session.publish({"type": "end"})
            with registry_lock:
                sessions.pop(token, None)
        return JSONResponse({"closed": True})

    @app.get("/v1/sessions/{token}/stream")
    def stream(token: str):
        api_session = get_session(token)
        q: queue.Queue = queue.Queue()
        api_session.streams.append(q)

        def events():
            try:
                while True:
                    try:
                        event = q.get(timeout=heartbeat)
                    except queue.Empty:
                        yield "event: heartbeat\ndata: {}\n\n"
                        continue
                    yield f"event: {event.get('type', 'trial')}\n" \
                          f"data: {json.dumps(event)}\n\n"
                    if event.get("type") == "end":
                        return
            finally:
                if q in api_session.streams:
                    api_session.streams.remove(q)

        return StreamingResponse(events(), media_type="text/event-stream")

    app.state.sessions = sessions
    return app
