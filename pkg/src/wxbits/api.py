"""Versioned HTTP API over the contest engine.

All payloads are canonical JSON (sorted keys, numbers-as-strings for
decimals and bits) so that golden files, CLI output, and the web UI see
byte-identical encodings. Input bodies are validated against the JSON
Schema files shipped in ``wxbits/schemas``, the same files the UI uses.
"""

from __future__ import annotations

import json
from datetime import date, datetime, timezone
from decimal import Decimal, InvalidOperation
from importlib import resources

import jsonschema
from fastapi import FastAPI, Request, Response

from .baseline import build_baselines, ingest_members, parse_members_csv
from .core import Observation, VariableKind, VariableSpec, canonical_json, fmt_ts, parse_ts
from .engine import ContestEngine
from .errors import ContestError, SchemaError, UnknownGame

API_PREFIX = "/v1"

_STATUS_BY_CODE = {
    "InvalidAllocation": 400,
    "DomainError": 400,
    "ArityMismatch": 400,
    "UnitMismatch": 400,
    "ParseError": 400,
    "SchemaError": 400,
    "EmptyInput": 400,
    "InsufficientMembers": 400,
    "DegenerateEnsemble": 400,
    "InfeasibleClamp": 400,
    "ConfigError": 400,
    "MissingObservation": 400,
    "UnknownGame": 404,
    "UnknownPlayer": 404,
    "WrongState": 409,
    "GameNotOpen": 409,
    "AlreadyVerified": 409,
    "ConflictingEvent": 409,
    "DeadlinePassed": 423,
    "CorruptLog": 500,
}


def load_schema(name: str) -> dict:
    """One of the published JSON Schema files (game, submission, ...)."""
    text = resources.files("wxbits.schemas").joinpath(f"{name}.json").read_text("utf-8")
    return json.loads(text)


_VALIDATORS: dict[str, jsonschema.Validator] = {}


def validate_payload(name: str, payload) -> None:
    if name not in _VALIDATORS:
        schema = load_schema(name)
        _VALIDATORS[name] = jsonschema.Draft202012Validator(schema)
    errors = sorted(_VALIDATORS[name].iter_errors(payload), key=str)
    if errors:
        first = errors[0]
        where = "/".join(str(p) for p in first.absolute_path) or "<root>"
        raise SchemaError(f"{name} schema: {first.message} at {where}")


def canonical_response(payload, status_code: int = 200) -> Response:
    return Response(
        content=canonical_json(payload),
        status_code=status_code,
        media_type="application/json",
    )


def error_response(code: str, message: str) -> Response:
    status = _STATUS_BY_CODE.get(code, 500)
    return canonical_response({"code": code, "message": message}, status_code=status)


def create_app(engine: ContestEngine) -> FastAPI:
    app = FastAPI(title="wxbits", docs_url=None, redoc_url=None)

    @app.exception_handler(ContestError)
    async def _domain_error(_request: Request, exc: ContestError):
        return error_response(exc.code, str(exc))

    @app.middleware("http")
    async def _server_time(request: Request, call_next):
        # the UI's deadline countdown keys off this header, not client clocks
        response = await call_next(request)
        response.headers["X-Server-Time"] = fmt_ts(datetime.now(timezone.utc))
        return response

    @app.post(API_PREFIX + "/games")
    async def create_game(request: Request):
        body = await _json_body(request)
        site = _require_str(body, "site")
        forecast_day = _parse_day(_require_str(body, "forecast_day"))
        game_id = body.get("id") or f"{site}-{forecast_day.isoformat()}"
        deadline = parse_ts(body["deadline"]) if "deadline" in body else None
        game = engine.create_game(
            game_id,
            site=site,
            forecast_day=forecast_day,
            ts=datetime.now(timezone.utc),
            deadline=deadline,
        )
        return canonical_response(game.public_payload(), status_code=201)

    @app.post(API_PREFIX + "/games/{game_id}/baseline")
    async def publish_baseline(game_id: str, request: Request):
        body = await _json_body(request)
        if "members_csv" in body:
            samples = parse_members_csv(_require_str(body, "members_csv"))
        elif "path" in body:
            samples = ingest_members(_require_str(body, "path"))  # dev mode
        else:
            raise SchemaError("body needs members_csv or path")
        published_at = (
            parse_ts(body["published_at"])
            if "published_at" in body
            else datetime.now(timezone.utc)
        )
        clamp_factor = float(body.get("clamp_factor", 4.0))
        baselines = build_baselines(samples, published_at=published_at, clamp_factor=clamp_factor)
        game = engine.set_baseline(game_id, baselines, ts=published_at)
        return canonical_response(game.public_payload())

    @app.post(API_PREFIX + "/games/{game_id}/open")
    async def open_game(game_id: str):
        game = engine.open_game(game_id, ts=datetime.now(timezone.utc))
        return canonical_response(game.public_payload())

    @app.get(API_PREFIX + "/games/{game_id}")
    async def get_game(game_id: str):
        if game_id not in engine.games:
            raise UnknownGame(f"no game {game_id}")
        return canonical_response(engine.games[game_id].public_payload())

    @app.put(API_PREFIX + "/games/{game_id}/submissions/{player_id}")
    async def put_submission(game_id: str, player_id: str, request: Request):
        body = await _json_body(request)
        validate_payload("submission", body)
        body["player_id"] = player_id
        sub = engine.submit(game_id, body, now=datetime.now(timezone.utc))
        return canonical_response(sub.to_payload())

    @app.post(API_PREFIX + "/games/{game_id}/lock")
    async def lock_game(game_id: str):
        game = engine.lock(game_id, ts=datetime.now(timezone.utc))
        return canonical_response(game.public_payload())

    @app.post(API_PREFIX + "/games/{game_id}/observations")
    async def set_observations(game_id: str, request: Request):
        body = await _json_body(request)
        validate_payload("observations", body)
        game = engine._game(game_id)
        observations = {}
        for kind_raw, obs in body["observations"].items():
            kind = VariableKind(kind_raw)
            day = (
                date.fromisoformat(obs["date"]) if "date" in obs else game.forecast_day
            )
            observations[kind] = Observation(
                variable=VariableSpec.for_kind(kind),
                value=_decimal(obs["value"]),
                valid_day=day,
                trace=bool(obs.get("trace", False)),
            )
        engine.set_observations(game_id, observations, ts=datetime.now(timezone.utc))
        return canonical_response(engine.games[game_id].public_payload())

    @app.post(API_PREFIX + "/games/{game_id}/verify")
    async def verify_game(game_id: str):
        engine.verify(game_id, ts=datetime.now(timezone.utc))
        return canonical_response(engine.scores_payload(game_id))

    @app.get(API_PREFIX + "/games/{game_id}/scores")
    async def get_scores(game_id: str):
        return canonical_response(engine.scores_payload(game_id))

    @app.get(API_PREFIX + "/leaderboard")
    async def get_leaderboard():
        return canonical_response(engine.leaderboard())

    @app.get(API_PREFIX + "/players/{player_id}/diagnostics")
    async def get_diagnostics(player_id: str):
        return canonical_response(engine.diagnostics_payload(player_id))

    return app


async def _json_body(request: Request) -> dict:
    try:
        body = await request.json()
    except json.JSONDecodeError as exc:
        raise SchemaError(f"request body is not JSON: {exc.msg}") from None
    if not isinstance(body, dict):
        raise SchemaError("request body must be a JSON object")
    return body


def _require_str(body: dict, key: str) -> str:
    value = body.get(key)
    if not isinstance(value, str) or not value:
        raise SchemaError(f"body needs a non-empty string {key!r}")
    return value


def _parse_day(text: str) -> date:
    try:
        return date.fromisoformat(text)
    except ValueError:
        raise SchemaError(f"bad date {text!r}") from None


def _decimal(text: str) -> Decimal:
    try:
        return Decimal(text)
    except InvalidOperation:
        raise SchemaError(f"bad decimal {text!r}") from None


def serve(log_path: str, host: str = "127.0.0.1", port: int = 8000) -> None:
    """Run the API over a file-backed engine (blocking)."""
    import uvicorn

    uvicorn.run(create_app(ContestEngine(log_path=log_path)), host=host, port=port)
