"""Turn-based session service: the command-line-agent experience over HTTP.

Each session owns one episode (user simulator + state tracker); the client
plays the agent by posting dialog acts or natural language. Per-session
actions are serialized: a second action while one is in flight gets a 409.
Error bodies are {code, message, hint}.
"""

from __future__ import annotations

import argparse
import random
import threading
import time
import uuid

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import data_path
from .core import (
    SPEAKER_AGENT,
    DialogAct,
    DialogsimError,
    DomainSchema,
    load_schema,
    parse_act_string,
    validate_act,
)
from .corpus import GoalDatabase, load_goal_db
from .env import DialogueEnv
from .kb import MovieKB, load_kb
from .nlg import TemplateSet, load_templates, parse_nl
from .noise import MODE_MIXED, ErrorModelConfig

DEFAULT_SESSION_TTL = 30 * 60.0


class ServiceError(DialogsimError):
    def __init__(self, status_code: int, code: str, message: str, hint: str = ""):
        super().__init__(message)
        self.status_code = status_code
        self.code = code
        self.hint = hint

    def body(self) -> dict:
        return {"code": self.code, "message": str(self), "hint": self.hint}


class CreateSessionRequest(BaseModel):
    intent_err_prob: float = 0.0
    slot_err_prob: float = 0.0
    slot_err_mode: str = MODE_MIXED
    input_mode: str = "act"  # "act" | "nl"
    reveal_goal: bool = True
    seed: int | None = None


class ActionRequest(BaseModel):
    mode: str | None = None  # defaults to the session's input mode
    act: dict | str | None = None
    nl: str | None = None


class Session:
    def __init__(self, session_id: str, env: DialogueEnv, config: CreateSessionRequest):
        self.id = session_id
        self.env = env
        self.config = config
        self.lock = threading.Lock()
        self.created = time.time()
        self.last_active = self.created

    def touch(self):
        self.last_active = time.time()

    @property
    def terminal(self) -> bool:
        return self.env.done


def _act_payload(act: DialogAct | None) -> dict | None:
    return act.to_dict() if act is not None else None


def create_app(
    schema: DomainSchema,
    kb: MovieKB,
    goal_db: GoalDatabase,
    templates: TemplateSet,
    session_ttl: float = DEFAULT_SESSION_TTL,
    console_dist: str | None = None,
) -> FastAPI:
    app = FastAPI(title="dialogsim session service")
    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()
    template_entries = [
        {
            "speaker": e.speaker,
            "intent": e.intent,
            "inform_slots": list(e.inform_slots),
            "request_slots": list(e.request_slots),
            "template": e.template,
            **({"values": e.values} if e.values else {}),
        }
        for e in templates.entries
    ]

    @app.exception_handler(ServiceError)
    async def service_error_handler(_: Request, exc: ServiceError):
        return JSONResponse(status_code=exc.status_code, content=exc.body())

    @app.exception_handler(RequestValidationError)
    async def validation_error_handler(_: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content={
                "code": "bad_request",
                "message": "request body failed validation",
                "hint": str(exc.errors()[:3]),
            },
        )

    def sweep():
        now = time.time()
        with registry_lock:
            stale = [sid for sid, s in sessions.items() if now - s.last_active > session_ttl]
            for sid in stale:
                del sessions[sid]

    def get_session(session_id: str) -> Session:
        with registry_lock:
            session = sessions.get(session_id)
        if session is None:
            raise ServiceError(404, "session_not_found", f"no session {session_id}")
        session.touch()
        return session

    def suggestions_payload(session: Session, user_act: DialogAct | None) -> dict:
        if user_act is None or not user_act.request_slots:
            return {}
        return session.env.tracker.suggestions_for(user_act.request_slots)

    @app.post("/api/sessions", status_code=201)
    def create_session(body: CreateSessionRequest):
        sweep()
        try:
            noise = ErrorModelConfig(
                intent_err_prob=body.intent_err_prob,
                slot_err_prob=body.slot_err_prob,
                slot_err_mode=body.slot_err_mode,
            )
        except DialogsimError as exc:
            raise ServiceError(422, "invalid_config", str(exc))
        if body.input_mode not in ("act", "nl"):
            raise ServiceError(422, "invalid_config", "input_mode must be 'act' or 'nl'")
        env = DialogueEnv(schema, kb, goal_db, noise_cfg=noise, templates=templates)
        session = Session(uuid.uuid4().hex, env, body)
        rng = random.Random(body.seed) if body.seed is not None else random.Random()
        first_act = env.reset(rng)
        with registry_lock:
            sessions[session.id] = session
        payload = {
            "id": session.id,
            "first_user_act": _act_payload(first_act),
            "suggested_values": suggestions_payload(session, first_act),
            "episode_over": False,
            "status": env.status.value,
            "turn_count": len(env.transcript),
        }
        if body.reveal_goal:
            payload["goal"] = env.user_state.goal.to_dict()
        return payload

    def parse_action(session: Session, body: ActionRequest) -> DialogAct:
        mode = body.mode or session.config.input_mode
        turn = session.env.tracker.turn + 1
        if mode == "nl":
            if not body.nl or not body.nl.strip():
                raise ServiceError(422, "nl_no_parse", "empty utterance",
                                   hint="type something, or switch to act mode")
            act = parse_nl(body.nl, templates, schema, speaker=SPEAKER_AGENT)
            if act is None:
                raise ServiceError(
                    422, "nl_no_parse", f"could not parse {body.nl!r}",
                    hint="try act mode, e.g. request(city) or inform(theater=...)",
                )
            act.turn = turn
            act.nl = body.nl
            return act
        if mode != "act":
            raise ServiceError(422, "bad_request", f"unknown mode {mode!r}")
        if body.act is None:
            raise ServiceError(422, "invalid_act", "missing act payload")
        try:
            if isinstance(body.act, str):
                return parse_act_string(body.act, schema, SPEAKER_AGENT, turn)
            act = DialogAct.from_dict({**body.act, "speaker": SPEAKER_AGENT, "turn": turn})
        except (DialogsimError, KeyError, TypeError) as exc:
            raise ServiceError(422, "invalid_act", f"malformed act: {exc}")
        violations = validate_act(schema, act)
        if violations:
            raise ServiceError(422, "invalid_act", "; ".join(violations))
        return act

    @app.post("/api/sessions/{session_id}/action")
    def post_action(session_id: str, body: ActionRequest):
        session = get_session(session_id)
        if session.terminal:
            raise ServiceError(
                409, "session_terminal",
                f"session already finished with status {session.env.status.value}",
            )
        if not session.lock.acquire(blocking=False):
            raise ServiceError(409, "turn_in_progress",
                               "another action is being processed for this session")
        try:
            act = parse_action(session, body)
            try:
                user_act, _, done, status = session.env.step_act(act)
            except DialogsimError as exc:
                raise ServiceError(422, "invalid_act", str(exc))
            return {
                "user_act": _act_payload(user_act),
                "corrected_agent_act": _act_payload(session.env.tracker.last_agent_act),
                "suggested_values": suggestions_payload(session, user_act),
                "episode_over": done,
                "status": status.value,
                "turn_count": len(session.env.transcript),
            }
        finally:
            session.lock.release()

    @app.get("/api/sessions/{session_id}")
    def get_session_snapshot(session_id: str):
        session = get_session(session_id)
        with session.lock:
            payload = {
                "id": session.id,
                "status": session.env.status.value,
                "episode_over": session.env.done,
                "transcript": [a.to_dict() for a in session.env.transcript],
                "turn_count": len(session.env.transcript),
                "config": session.config.model_dump(),
            }
            if session.config.reveal_goal:
                payload["goal"] = session.env.user_state.goal.to_dict()
        return payload

    @app.get("/api/schema")
    def get_schema():
        return schema.to_dict()

    @app.get("/api/templates")
    def get_templates():
        return template_entries

    if console_dist:
        from pathlib import Path

        dist = Path(console_dist)
        if dist.is_dir():
            from fastapi.staticfiles import StaticFiles

            app.mount("/", StaticFiles(directory=str(dist), html=True), name="console")

    return app


def app_from_paths(
    schema_path, kb_path, goal_path, template_path,
    session_ttl: float = DEFAULT_SESSION_TTL,
    console_dist: str | None = None,
) -> FastAPI:
    schema = load_schema(schema_path)
    kb = load_kb(kb_path, schema)
    goal_db = load_goal_db(goal_path, schema)
    templates = load_templates(template_path, schema)
    templates.attach_lexicon(kb)
    return create_app(
        schema, kb, goal_db, templates,
        session_ttl=session_ttl, console_dist=console_dist,
    )


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="dialogsim-service")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8440)
    parser.add_argument("--schema_path", default=str(data_path("schema.json")))
    parser.add_argument("--movie_kb_path", default=str(data_path("movie_kb.json")))
    parser.add_argument("--goal_file_path", default=str(data_path("user_goals.json")))
    parser.add_argument("--template_path", default=str(data_path("templates.json")))
    parser.add_argument("--session_ttl", type=float, default=DEFAULT_SESSION_TTL)
    parser.add_argument("--console_dist", default="", help="built console assets to serve at /")
    args = parser.parse_args(argv)

    import uvicorn

    app = app_from_paths(
        args.schema_path, args.movie_kb_path, args.goal_file_path, args.template_path,
        session_ttl=args.session_ttl,
        console_dist=args.console_dist or None,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
