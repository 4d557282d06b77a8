"""HTTP query API over a store, consumed by the dashboard and the CLI.

Endpoints (all GET, JSON): /api/events, /api/events/{label}, /api/timeseries,
/api/trending-tags, /api/health. Every error body has the shape
{"error": {"code": ..., "message": ...}} so clients need one handler.
"""

from __future__ import annotations

from datetime import datetime, timedelta, timezone
from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from starlette.exceptions import HTTPException as StarletteHTTPException

from . import store as store_mod
from .records import parse_timestamp
from .store import Store

MAX_LIMIT = 200

_RANGE_MIN = datetime(1970, 1, 1, tzinfo=timezone.utc)
_RANGE_MAX = datetime(9999, 12, 31, tzinfo=timezone.utc)


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


def _error_response(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": {"code": code, "message": message}})


def _parse_bound(raw: str | None, fallback: datetime, name: str) -> datetime:
    if raw is None:
        return fallback
    try:
        return parse_timestamp(raw)
    except ValueError as exc:
        raise ApiError(400, "bad_timestamp", f"{name}: {exc}") from exc


def _check_limit(limit: int) -> int:
    if limit < 1:
        raise ApiError(400, "bad_limit", "limit must be >= 1")
    if limit > MAX_LIMIT:
        raise ApiError(400, "bad_limit", f"limit must be <= {MAX_LIMIT}")
    return limit


def create_app(store: Store, static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="newslens", docs_url=None, redoc_url=None)

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError):
        return _error_response(exc.status, exc.code, exc.message)

    @app.exception_handler(ValueError)
    async def handle_value_error(request: Request, exc: ValueError):
        return _error_response(400, "bad_request", str(exc))

    @app.exception_handler(RequestValidationError)
    async def handle_validation(request: Request, exc: RequestValidationError):
        return _error_response(400, "validation", str(exc.errors()[0].get("msg", "invalid parameter")))

    @app.exception_handler(StarletteHTTPException)
    async def handle_http(request: Request, exc: StarletteHTTPException):
        code = "not_found" if exc.status_code == 404 else "http_error"
        return _error_response(exc.status_code, code, str(exc.detail))

    @app.get("/api/health")
    def health():
        return {"status": "ok", "revision": store.revision}

    @app.get("/api/events")
    def events(
        time_from: str | None = Query(default=None, alias="from"),
        time_to: str | None = Query(default=None, alias="to"),
        q: str | None = None,
        group_by: str = store_mod.GROUP_EVENTS,
        limit: int = 50,
        offset: int = 0,
    ):
        lo = _parse_bound(time_from, _RANGE_MIN, "from")
        hi = _parse_bound(time_to, _RANGE_MAX, "to")
        page = store.query_events(
            time_from=lo, time_to=hi, keyword=q,
            group_by=group_by, limit=_check_limit(limit), offset=offset,
        )
        return page.to_dict()

    @app.get("/api/events/{label}")
    def event_detail(label: str):
        record = store.get_event(label)
        if record is None:
            raise ApiError(404, "not_found", f"no event {label!r}")
        return record.to_dict()

    @app.get("/api/timeseries")
    def timeseries(
        metric: str,
        scope: str | None = None,
        time_from: str | None = Query(default=None, alias="from"),
        time_to: str | None = Query(default=None, alias="to"),
        bucket_hours: float = 24.0,
    ):
        lo = _parse_bound(time_from, _RANGE_MIN, "from")
        hi = _parse_bound(time_to, _RANGE_MAX, "to")
        if bucket_hours <= 0:
            raise ApiError(400, "bad_bucket", "bucket_hours must be positive")
        points = store.metrics_timeseries(
            scope=scope, metric=metric, time_from=lo, time_to=hi,
            bucket=timedelta(hours=bucket_hours),
        )
        return {"points": [p.to_dict() for p in points]}

    @app.get("/api/trending-tags")
    def trending(
        time_from: str | None = Query(default=None, alias="from"),
        time_to: str | None = Query(default=None, alias="to"),
        limit: int = 20,
    ):
        lo = _parse_bound(time_from, _RANGE_MIN, "from")
        hi = _parse_bound(time_to, _RANGE_MAX, "to")
        tags = store.trending_tags(time_from=lo, time_to=hi, k=_check_limit(limit))
        return {"tags": [{"tag": tag, "events": count} for tag, count in tags]}

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="dashboard")

    return app
