"""Session-scoped HTTP API backing the web assistant.

One session is one game in progress: the client submits (guess, code)
pairs as the live game reveals feedback, and gets back the viable count,
ranked suggestions, and a sample of the remaining answers. Sessions live
in memory, are keyed by unguessable tokens, and expire after an idle
timeout. Undo replays the shortened history from round 1 against the
shared immutable matrix.
"""

from __future__ import annotations

import math
import secrets
import threading
import time
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .feedback import all_green_code, encode_code, decode_code, parse_code
from .matrix import (
    HARD,
    NORMAL,
    CodeMatrix,
    GameState,
    InconsistentFeedbackError,
    apply_feedback,
    new_game,
)
from .scoring import Policy, bucket_histogram, rank_guesses, validate_p

DEFAULT_SESSION_TTL = 24 * 3600.0
DEFAULT_SUGGESTIONS = 10
MAX_SUGGESTIONS = 100
VIABLE_SAMPLE = 20


class CreateSessionRequest(BaseModel):
    mode: str = NORMAL
    p: float | str = -0.5
    fds: bool = False


class GuessRequest(BaseModel):
    word: str = Field(min_length=1)
    code: str = Field(min_length=1)


@dataclass
class Session:
    id: str
    state: GameState
    policy: Policy
    solved: bool = False
    created: float = field(default_factory=time.time)
    last_used: float = field(default_factory=time.time)
    lock: threading.Lock = field(default_factory=threading.Lock)


def _parse_request_p(value) -> float:
    if isinstance(value, str):
        t = value.strip().lower()
        if t in ("inf", "+inf"):
            return math.inf
        if t == "-inf":
            return -math.inf
        try:
            value = float(t)
        except ValueError:
            raise HTTPException(422, f"invalid p value {value!r}") from None
    try:
        return validate_p(value)
    except ValueError as exc:
        raise HTTPException(422, str(exc)) from None


def create_app(matrix: CodeMatrix, *, static_dir: str | None = None,
               session_ttl: float = DEFAULT_SESSION_TTL) -> FastAPI:
    app = FastAPI(title="wordlab assistant API")
    sessions: dict[str, Session] = {}
    store_lock = threading.Lock()
    rank_cache: dict[tuple, list] = {}  # round-1 rankings per policy/mode/limit

    def purge_expired() -> None:
        now = time.time()
        with store_lock:
            dead = [sid for sid, s in sessions.items() if now - s.last_used > session_ttl]
            for sid in dead:
                del sessions[sid]

    def get_session(session_id: str) -> Session:
        purge_expired()
        with store_lock:
            session = sessions.get(session_id)
        if session is None:
            raise HTTPException(404, "unknown session")
        session.last_used = time.time()
        return session

    def suggestions_for(state: GameState, policy: Policy, limit: int) -> list[dict]:
        limit = max(1, min(int(limit), MAX_SUGGESTIONS))
        key = (policy.key(), state.mode, limit)
        if not state.history:
            hit = rank_cache.get(key)
            if hit is not None:
                return hit
        reports = rank_guesses(state, policy, top_k=limit)
        out = []
        for r in reports:
            h = bucket_histogram(state, r.row)
            out.append(
                {
                    "word": r.word,
                    "score": r.score,
                    "in_viable": r.in_viable,
                    "expected_gy": round(r.expected_gy, 4),
                    "worst_bucket": max(h.buckets.values(), default=0),
                }
            )
        if not state.history:
            rank_cache[key] = out
        return out

    def state_view(session: Session, limit: int = DEFAULT_SUGGESTIONS,
                   include_suggestions: bool = True) -> dict:
        state = session.state
        view = {
            "session_id": session.id,
            "mode": state.mode,
            "round": state.round,
            "viable_count": state.viable_count,
            "solved": session.solved,
            "history": [
                {
                    "word": matrix.guesses.words[row],
                    "code": decode_code(code, matrix.word_length),
                }
                for row, code in state.history
            ],
            "viable_sample": state.viable_words()[:VIABLE_SAMPLE],
        }
        if include_suggestions:
            view["suggestions"] = (
                [] if session.solved else suggestions_for(state, session.policy, limit)
            )
        return view

    @app.get("/api/health")
    def health():
        return {
            "status": "ok",
            "guess_words": matrix.guesses.size,
            "answer_words": matrix.answers.size,
            "word_length": matrix.word_length,
        }

    @app.post("/api/sessions", status_code=201)
    def create_session(req: CreateSessionRequest, limit: int = DEFAULT_SUGGESTIONS):
        if req.mode not in (NORMAL, HARD):
            raise HTTPException(422, f"mode must be '{NORMAL}' or '{HARD}'")
        policy = Policy(p=_parse_request_p(req.p), use_fds=req.fds)
        session = Session(
            id=secrets.token_urlsafe(24),
            state=new_game(matrix, req.mode),
            policy=policy,
        )
        purge_expired()
        with store_lock:
            sessions[session.id] = session
        return state_view(session, limit)

    @app.get("/api/sessions/{session_id}")
    def get_state(session_id: str, limit: int = DEFAULT_SUGGESTIONS):
        session = get_session(session_id)
        with session.lock:
            return state_view(session, limit)

    @app.delete("/api/sessions/{session_id}", status_code=204)
    def delete_session(session_id: str):
        get_session(session_id)
        with store_lock:
            sessions.pop(session_id, None)

    @app.post("/api/sessions/{session_id}/guesses")
    def submit_feedback(session_id: str, req: GuessRequest, limit: int = DEFAULT_SUGGESTIONS):
        session = get_session(session_id)
        with session.lock:
            if session.solved:
                raise HTTPException(409, "game already solved; undo to continue")
            row = matrix.guesses.index_of(req.word)
            if row < 0:
                raise HTTPException(422, f"{req.word!r} is not in the guess list")
            try:
                code = encode_code(parse_code(req.code, matrix.word_length))
            except ValueError as exc:
                raise HTTPException(422, str(exc)) from None
            if code == all_green_code(matrix.word_length):
                import numpy as np

                session.solved = True
                col = int(matrix.row_to_col[row])
                viable = (
                    np.asarray([col], dtype=np.int32)
                    if col >= 0
                    else session.state.viable_cols
                )
                session.state = GameState(
                    matrix=session.state.matrix,
                    viable_cols=viable,
                    guessed_rows=session.state.guessed_rows + (row,),
                    round=session.state.round,
                    mode=session.state.mode,
                    history=session.state.history + ((row, code),),
                )
                return state_view(session, limit)
            try:
                session.state = apply_feedback(session.state, row, code)
            except InconsistentFeedbackError as exc:
                raise HTTPException(409, str(exc)) from None
            except ValueError as exc:
                raise HTTPException(422, str(exc)) from None
            return state_view(session, limit)

    @app.post("/api/sessions/{session_id}/undo")
    def undo(session_id: str, limit: int = DEFAULT_SUGGESTIONS):
        session = get_session(session_id)
        with session.lock:
            if not session.state.history:
                raise HTTPException(409, "nothing to undo")
            history = session.state.history[:-1]
            state = new_game(matrix, session.state.mode)
            for row, code in history:
                state = apply_feedback(state, row, code)
            session.state = state
            session.solved = False
            return state_view(session, limit)

    if static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
