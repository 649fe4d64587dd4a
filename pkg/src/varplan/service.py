"""Session-oriented HTTP API over the core library.

Requests carry environments and variations in the interchange format; the
only server-side state is the session store, guarded by per-request version
checks so concurrent answers to one session cannot interleave.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request, Response

from . import serde
from .defaults import default_ontology, default_registry
from .errors import (
    DocumentError,
    InvalidAnswerError,
    NoChangesDetectedError,
    StaleVersionError,
    VarplanError,
)
from .executor import execute
from .kb import EnvironmentState, KnowledgeBase
from .planner import plan
from .comparison import compare_environment
from .session import Question, Session, answer, start_session
from .skills import SkillRegistry
from .variation import EnvironmentVariation


@dataclass
class StoredSession:
    session: Session
    version: int
    kb: KnowledgeBase


class SessionStore:
    """Monotonic ids plus optimistic versioning per session."""

    def __init__(self):
        self._lock = threading.Lock()
        self._sessions: dict[str, StoredSession] = {}
        self._counter = 0

    def create(self, session: Session, kb: KnowledgeBase) -> tuple[str, StoredSession]:
        with self._lock:
            self._counter += 1
            session_id = f"s{self._counter}"
            stored = StoredSession(session, 1, kb)
            self._sessions[session_id] = stored
            return session_id, stored

    def get(self, session_id: str) -> StoredSession:
        with self._lock:
            if session_id not in self._sessions:
                raise KeyError(session_id)
            return self._sessions[session_id]

    def apply(self, session_id: str, expected_version: int, raw_answer):
        with self._lock:
            if session_id not in self._sessions:
                raise KeyError(session_id)
            stored = self._sessions[session_id]
            if stored.version != expected_version:
                raise StaleVersionError(
                    f"expected version {stored.version}, got {expected_version}"
                )
            new_session, outcome = answer(stored.session, raw_answer)
            stored.session = new_session
            stored.version += 1
            return stored, outcome


def _canonical(doc: Any, status_code: int = 200) -> Response:
    return Response(
        content=serde.canonical_dumps(doc),
        media_type="application/json",
        status_code=status_code,
    )


def _error(code: str, message: str, status: int, path: str = "$") -> Response:
    return _canonical({"code": code, "path": path, "message": message}, status)


def create_app(
    kb: KnowledgeBase | None = None,
    registry: SkillRegistry | None = None,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    base_kb = kb or default_ontology()
    registry = registry or default_registry()
    store = SessionStore()
    app = FastAPI(title="varplan", version="0.1.0")

    @app.exception_handler(DocumentError)
    async def on_document_error(_request, exc: DocumentError):
        return _error("validation_error", exc.message, 400, exc.path)

    @app.exception_handler(VarplanError)
    async def on_varplan_error(_request, exc: VarplanError):
        status = 409 if isinstance(exc, StaleVersionError) else 400
        code = "stale_version" if isinstance(exc, StaleVersionError) else "invalid_request"
        return _error(code, str(exc), status)

    def request_kb(body: dict) -> KnowledgeBase:
        if "ontology" in body and body["ontology"] is not None:
            return serde.ontology_from_doc(body["ontology"])
        return base_kb

    def request_env(kb_: KnowledgeBase, body: dict, key: str) -> EnvironmentState:
        if key not in body:
            raise DocumentError(f"$.{key}", "missing environment document")
        return serde.env_from_doc(kb_, body[key])

    def request_variation(body: dict, key: str = "variation") -> EnvironmentVariation:
        if key not in body:
            raise DocumentError(f"$.{key}", "missing variation document")
        variation = serde.variation_from_doc(body[key], f"$.{key}")
        if not isinstance(variation, EnvironmentVariation):
            raise DocumentError(f"$.{key}", "expected an environment variation")
        return variation

    @app.post("/v1/sessions")
    async def create_session(request: Request):
        body = await request.json()
        kb_ = request_kb(body)
        before = request_env(kb_, body, "before")
        after = request_env(kb_, body, "after")
        try:
            session, question = start_session(before, after, registry)
        except NoChangesDetectedError as exc:
            return _error("no_changes", str(exc), 400)
        session_id, stored = store.create(session, kb_)
        return _canonical({
            "session": session_id,
            "version": stored.version,
            "question": serde.question_to_doc(question),
        })

    @app.post("/v1/sessions/{session_id}/answers")
    async def post_answer(session_id: str, request: Request):
        body = await request.json()
        if "version" not in body or "answer" not in body:
            raise DocumentError("$", "answer requests need 'version' and 'answer'")
        raw = serde.answer_from_doc(body["answer"], "$.answer")
        try:
            stored, outcome = store.apply(session_id, int(body["version"]), raw)
        except KeyError:
            return _error("not_found", f"unknown session {session_id!r}", 404)
        except InvalidAnswerError as exc:
            return _error("invalid_answer", str(exc), 400)
        payload: dict = {"session": session_id, "version": stored.version}
        if isinstance(outcome, Question):
            payload["question"] = serde.question_to_doc(outcome)
        else:
            payload["completed"] = serde.variation_to_doc(outcome)
        return _canonical(payload)

    @app.get("/v1/sessions/{session_id}")
    async def get_session(session_id: str):
        try:
            stored = store.get(session_id)
        except KeyError:
            return _error("not_found", f"unknown session {session_id!r}", 404)
        doc = serde.transcript_to_doc(stored.session)
        doc["version"] = stored.version
        return _canonical(doc)

    @app.get("/v1/sessions/{session_id}/variation")
    async def get_session_variation(session_id: str):
        try:
            stored = store.get(session_id)
        except KeyError:
            return _error("not_found", f"unknown session {session_id!r}", 404)
        if stored.session.result is None:
            return _error("incomplete", "session has not produced a variation yet", 409)
        return _canonical(serde.variation_to_doc(stored.session.result))

    @app.post("/v1/compare")
    async def post_compare(request: Request):
        body = await request.json()
        kb_ = request_kb(body)
        env = request_env(kb_, body, "env")
        variation = request_variation(body)
        comparison = compare_environment(env, variation)
        return _canonical(serde.environment_comparison_to_doc(comparison))

    @app.post("/v1/plan")
    async def post_plan(request: Request):
        body = await request.json()
        kb_ = request_kb(body)
        env = request_env(kb_, body, "env")
        variation = request_variation(body)
        result = plan(env, variation, registry)
        return _canonical(serde.plan_result_to_doc(result))

    @app.post("/v1/execute")
    async def post_execute(request: Request):
        body = await request.json()
        kb_ = request_kb(body)
        env = request_env(kb_, body, "env")
        if "plan" not in body:
            raise DocumentError("$.plan", "missing plan document")
        plan_doc = serde.plan_from_doc(registry, body["plan"], "$.plan")
        goal = request_variation(body) if body.get("variation") is not None else None
        trace = execute(plan_doc, env, goal)
        return _canonical(serde.trace_to_doc(trace, initial_env=env))

    if ui_dir is not None and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
