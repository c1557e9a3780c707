"""Command-line interface: thin wrappers over the engine, baseline builder,
and simulator.

Machine-readable output with --json is the canonical encoding, byte-for-byte
the same payloads the HTTP API serves (plus a trailing newline). Domain
errors exit 1 with the error code printed; usage errors exit 2.
"""

from __future__ import annotations

import functools
import json
import sys
from collections import Counter
from datetime import date, datetime, timezone
from pathlib import Path

import click

from .api import serve as api_serve, validate_payload
from .baseline import build_baselines, ingest_members
from .core import Observation, VariableKind, VariableSpec, canonical_json, parse_ts
from .engine import ContestEngine
from .errors import ConfigError, ContestError, SchemaError
from .simulator import SeasonConfig, simulate_season


def _now() -> datetime:
    return datetime.now(timezone.utc)


def guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ContestError as exc:
            click.echo(f"{exc.code}: {exc}", err=True)
            sys.exit(1)

    return wrapper


def emit(payload, as_json: bool, human) -> None:
    if as_json:
        click.echo(canonical_json(payload))
    else:
        human(payload)


@click.group()
@click.option(
    "--log",
    "log_path",
    envvar="WXBITS_LOG",
    default="season.log.jsonl",
    show_default=True,
    help="Append-only event log backing the contest state.",
)
@click.pass_context
def main(ctx, log_path):
    """Confidence-credit forecasting games scored in bits."""
    ctx.obj = log_path


@main.command()
@click.option("--members", "members_path", required=True, type=click.Path(exists=True))
@click.option("--json", "as_json", is_flag=True)
@guarded
def ingest(members_path, as_json):
    """Validate a member CSV and report per-variable counts."""
    samples = ingest_members(members_path)
    counts = Counter(s.variable.kind.value for s in samples)
    payload = {"counts": dict(sorted(counts.items())), "rows": len(samples)}
    emit(
        payload,
        as_json,
        lambda p: [
            click.echo(f"{kind}: {n} members") for kind, n in p["counts"].items()
        ],
    )


@main.command()
@click.option("--game", "game_id", required=True)
@click.option("--members", "members_path", required=True, type=click.Path(exists=True))
@click.option("--site", default=None, help="Create the game if missing (requires --day).")
@click.option("--day", default=None, help="Forecast day YYYY-MM-DD when creating.")
@click.option("--clamp-factor", default=4.0, show_default=True)
@click.option("--published-at", default=None, help="RFC 3339 baseline timestamp.")
@click.pass_obj
@guarded
def baseline(log_path, game_id, members_path, site, day, clamp_factor, published_at):
    """Build and publish the superensemble baseline for a game."""
    engine = ContestEngine(log_path=log_path)
    ts = parse_ts(published_at) if published_at else _now()
    if game_id not in engine.games:
        if not site or not day:
            raise SchemaError(f"game {game_id} does not exist; pass --site and --day to create it")
        engine.create_game(game_id, site=site, forecast_day=date.fromisoformat(day), ts=ts)
    samples = ingest_members(members_path)
    baselines = build_baselines(samples, published_at=ts, clamp_factor=clamp_factor)
    game = engine.set_baseline(game_id, baselines, ts=ts)
    engine.close()
    # the published artifact is the output, so this is always JSON
    payload = {k.value: b.to_payload() for k, b in sorted(game.baselines.items())}
    click.echo(canonical_json(payload))


@main.command(name="open")
@click.option("--game", "game_id", required=True)
@click.option("--json", "as_json", is_flag=True)
@click.pass_obj
@guarded
def open_cmd(log_path, game_id, as_json):
    """Open a game for submissions."""
    engine = ContestEngine(log_path=log_path)
    game = engine.open_game(game_id, ts=_now())
    engine.close()
    emit(game.public_payload(), as_json, lambda p: click.echo(f"{p['id']}: {p['state']}"))


@main.command()
@click.option("--game", "game_id", required=True)
@click.option("--file", "entry_path", required=True, type=click.Path(exists=True))
@click.option("--player", default=None, help="Override the player_id in the file.")
@click.option("--json", "as_json", is_flag=True)
@click.pass_obj
@guarded
def submit(log_path, game_id, entry_path, player, as_json):
    """Submit (or replace) a player's allocations from a JSON file."""
    entry = _read_json(entry_path)
    validate_payload("submission", entry)
    if player:
        entry["player_id"] = player
    engine = ContestEngine(log_path=log_path)
    sub = engine.submit(game_id, entry, now=_now())
    engine.close()
    emit(
        sub.to_payload(),
        as_json,
        lambda p: click.echo(f"accepted {p['player_id']} for {p['game_id']}"),
    )


@main.command()
@click.option("--game", "game_id", required=True)
@click.option("--json", "as_json", is_flag=True)
@click.pass_obj
@guarded
def lock(log_path, game_id, as_json):
    """Lock a game at the deadline."""
    engine = ContestEngine(log_path=log_path)
    game = engine.lock(game_id, ts=_now())
    engine.close()
    emit(game.public_payload(), as_json, lambda p: click.echo(f"{p['id']}: {p['state']}"))


def _observations_from_file(engine: ContestEngine, game_id: str, obs_path: str):
    body = _read_json(obs_path)
    validate_payload("observations", body)
    game = engine._game(game_id)
    observations = {}
    for kind_raw, obs in body["observations"].items():
        kind = VariableKind(kind_raw)
        day = date.fromisoformat(obs["date"]) if "date" in obs else game.forecast_day
        observations[kind] = Observation(
            variable=VariableSpec.for_kind(kind),
            value=obs["value"],
            valid_day=day,
            trace=bool(obs.get("trace", False)),
        )
    return observations


@main.command()
@click.option("--game", "game_id", required=True)
@click.option("--obs", "obs_path", required=True, type=click.Path(exists=True))
@click.option("--json", "as_json", is_flag=True)
@click.pass_obj
@guarded
def observe(log_path, game_id, obs_path, as_json):
    """Record verified observations for a locked game."""
    engine = ContestEngine(log_path=log_path)
    observations = _observations_from_file(engine, game_id, obs_path)
    game = engine.set_observations(game_id, observations, ts=_now())
    engine.close()
    emit(game.public_payload(), as_json, lambda p: click.echo(f"{p['id']}: observations set"))


@main.command()
@click.option("--game", "game_id", required=True)
@click.option("--obs", "obs_path", default=None, type=click.Path(exists=True))
@click.option("--json", "as_json", is_flag=True)
@click.pass_obj
@guarded
def verify(log_path, game_id, obs_path, as_json):
    """Score all submissions; optionally record observations first."""
    engine = ContestEngine(log_path=log_path)
    if obs_path:
        engine.set_observations(
            game_id, _observations_from_file(engine, game_id, obs_path), ts=_now()
        )
    engine.verify(game_id, ts=_now())
    payload = engine.scores_payload(game_id)
    engine.close()
    emit(payload, as_json, _human_scores)


@main.command()
@click.option("--game", "game_id", required=True)
@click.option("--json", "as_json", is_flag=True)
@click.pass_obj
@guarded
def scores(log_path, game_id, as_json):
    """Print the scored records for a game."""
    engine = ContestEngine.replay(log_path)
    emit(engine.scores_payload(game_id), as_json, _human_scores)


def _human_scores(payload) -> None:
    for r in payload["records"]:
        flag = " push" if r["pushed"] else ""
        click.echo(f"{r['player_id']:12s} {r['event_id']:22s} {r['bits']:>24s}{flag}")
    for pid, stats in payload["players"].items():
        click.echo(f"{pid}: mean {stats['mean_bits']} bits over {stats['n_events']} events")


@main.command()
@click.option("--json", "as_json", is_flag=True)
@click.pass_obj
@guarded
def leaderboard(log_path, as_json):
    """Print players ranked by mean bits over all verified games."""
    engine = ContestEngine.replay(log_path)
    emit(engine.leaderboard(), as_json, _human_leaderboard)


def _human_leaderboard(payload) -> None:
    for i, row in enumerate(payload["rows"], start=1):
        click.echo(
            f"{i:3d}. {row['player_id']:12s} mean {row['mean_bits']:>24s} bits"
            f"  (g1 {row['mean_bits_game1']}, g2 {row['mean_bits_game2']},"
            f" n={row['n_events']})"
        )


@main.command()
@click.option("--players", default=18, show_default=True)
@click.option("--days", default=125, show_default=True)
@click.option("--seed", default=7, show_default=True)
@click.option("--site", default="KOUN", show_default=True)
@click.option("--members", "n_members", default=30, show_default=True)
@click.option("--out", "out_path", default=None, help="Event log to write (defaults to --log).")
@click.option("--force", is_flag=True, help="Overwrite an existing output log.")
@click.option("--json", "as_json", is_flag=True)
@click.pass_obj
@guarded
def simulate(log_path, players, days, seed, site, n_members, out_path, force, as_json):
    """Run a reproducible synthetic season and print its leaderboard."""
    target = Path(out_path or log_path)
    if target.exists():
        if not force:
            raise ConfigError(f"{target} exists; pass --force to overwrite")
        target.unlink()
    config = SeasonConfig(
        players=players, days=days, seed=seed, site=site, n_members=n_members
    )
    engine = simulate_season(config, log_path=target)
    emit(engine.leaderboard(), as_json, _human_leaderboard)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.pass_obj
@guarded
def serve(log_path, host, port):
    """Serve the HTTP API over the event log."""
    api_serve(log_path, host=host, port=port)


def _read_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            body = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc.msg})") from None
    if not isinstance(body, dict):
        raise SchemaError(f"{path}: expected a JSON object")
    return body


if __name__ == "__main__":
    main()
