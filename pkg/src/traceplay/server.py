"""HTTP facade exposing trace sessions to the browser UI and to scripts.

Playback lives in the client: the server is clock-free and every response
is derived from the session's replay engine and caches.
"""

from __future__ import annotations

import logging
import threading
from pathlib import Path

from fastapi import Body, FastAPI, Query, Request
from fastapi.responses import JSONResponse, RedirectResponse, Response
from fastapi.staticfiles import StaticFiles

from .errors import PrefsError, RangeError, TraceError
from .extensions import VisualEvent, VisualEventKind
from .prefs import Preferences, prefs_from_payload, prefs_to_payload
from .session import TraceSession

log = logging.getLogger(__name__)


class SessionRegistry:
    """Open sessions by id; trace paths are confined to a root directory."""

    def __init__(self, root: str | Path):
        self.root = Path(root).resolve()
        self._sessions: dict[str, TraceSession] = {}
        self._lock = threading.Lock()

    def open(self, path: str, prefs: Preferences | None = None) -> TraceSession:
        candidate = Path(path)
        if not candidate.is_absolute():
            candidate = self.root / candidate
        resolved = candidate.resolve()
        if self.root not in (resolved, *resolved.parents):
            raise TraceError(f"trace path {path!r} is outside the served root directory")
        if not resolved.is_file():
            raise TraceError(f"trace file not found: {path!r}")
        session = TraceSession(resolved, prefs=prefs)
        with self._lock:
            self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> TraceSession | None:
        with self._lock:
            return self._sessions.get(session_id)

    def all(self) -> list[TraceSession]:
        with self._lock:
            return list(self._sessions.values())


def create_app(
    root: str | Path = ".",
    *,
    prefs: Preferences | None = None,
    open_path: str | Path | None = None,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    """Build the service; optionally pre-open a trace and host the UI bundle."""
    app = FastAPI(title="traceplay", docs_url=None, redoc_url=None)
    registry = SessionRegistry(root)
    app.state.registry = registry
    if open_path is not None:
        session = registry.open(str(open_path), prefs=prefs)
        log.info("opened session %s for %s", session.id, session.path)

    @app.exception_handler(RangeError)
    async def _range_error(_request: Request, exc: RangeError):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(TraceError)
    async def _trace_error(_request: Request, exc: TraceError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    def _session(session_id: str) -> TraceSession:
        session = registry.get(session_id)
        if session is None:
            raise RangeError(f"unknown session {session_id!r}")
        return session

    @app.post("/sessions", status_code=201)
    def open_session(body: dict = Body(...)):
        path = body.get("path")
        if not isinstance(path, str) or not path:
            raise TraceError("body must carry a trace 'path'")
        return registry.open(path, prefs=prefs).metadata()

    @app.get("/sessions")
    def list_sessions():
        return {"sessions": [session.metadata() for session in registry.all()]}

    @app.get("/sessions/{session_id}")
    def session_metadata(session_id: str):
        return _session(session_id).metadata()

    @app.get("/sessions/{session_id}/events/{k}")
    def get_event(session_id: str, k: int):
        return _session(session_id).event_payload(k)

    @app.get("/sessions/{session_id}/state/{k}")
    def get_state(session_id: str, k: int):
        return _session(session_id).state_payload(k)

    @app.get("/sessions/{session_id}/stats/{k}")
    def get_stats(session_id: str, k: int):
        return _session(session_id).stats_payload(k)

    @app.get("/sessions/{session_id}/partitions/{k}")
    def get_partitions(
        session_id: str,
        k: int,
        radio_range: float | None = Query(None, alias="range", ge=0),
    ):
        session = _session(session_id)
        if radio_range is None:
            radio_range = session.prefs.radio_range
        return session.partitions_payload(k, radio_range)

    @app.get("/sessions/{session_id}/screenshot/{k}.png")
    def get_screenshot(
        session_id: str,
        k: int,
        radio_range: float | None = Query(None, alias="range", ge=0),
    ):
        png = _session(session_id).screenshot_png(k, radio_range)
        return Response(content=png, media_type="image/png")

    @app.post("/sessions/{session_id}/notify")
    def notify(session_id: str, body: dict = Body(...)):
        session = _session(session_id)
        try:
            kind = VisualEventKind(body.get("kind"))
        except ValueError:
            raise TraceError(f"unknown visual event kind {body.get('kind')!r}") from None
        event_index = body.get("event_index")
        if not isinstance(event_index, int):
            raise TraceError("notify body must carry an integer 'event_index'")
        node_id = body.get("node_id")
        if node_id is not None and not isinstance(node_id, int):
            raise TraceError("'node_id' must be an integer when present")
        return session.notify(VisualEvent(kind=kind, event_index=event_index, node_id=node_id))

    @app.put("/sessions/{session_id}/prefs")
    def put_prefs(session_id: str, body: dict = Body(...)):
        session = _session(session_id)
        try:
            new_prefs = prefs_from_payload(body)
        except PrefsError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise TraceError(f"bad preferences payload: {exc}") from None
        session.set_prefs(new_prefs)
        return prefs_to_payload(session.prefs)

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

        @app.get("/", include_in_schema=False)
        def root_redirect():
            return RedirectResponse(url="/ui/")

    return app
