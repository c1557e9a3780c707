"""Game lifecycle state machine, submission validation, verification,
leaderboard, and append-only persistence.

States move strictly along
Draft -> BaselinePublished -> Open -> Locked -> Verified.
Every mutation is recorded as one JSON-lines event; replaying a log
reconstructs identical state, which makes verification auditable.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from datetime import date, datetime, time, timezone
from decimal import Decimal, InvalidOperation
from enum import Enum
from pathlib import Path
from typing import IO, Iterable

from .analytics import Decomposition, decompose, reliability_curve
from .baseline import BaselineSpec
from .core import (
    CreditAllocation,
    Observation,
    VariableKind,
    VariableSpec,
    canonical_json,
    credits_to_pmf,
    fmt_float,
    fmt_ts,
    parse_ts,
    quantize_to_resolution,
)
from .errors import (
    AlreadyVerified,
    ConflictingEvent,
    CorruptLog,
    DeadlinePassed,
    GameNotOpen,
    InvalidAllocation,
    MissingObservation,
    UnknownGame,
    UnknownPlayer,
    WrongState,
)
from .scoring import legacy_error_points, ranked_info_gain, score_over_under


class GameState(str, Enum):
    DRAFT = "draft"
    BASELINE_PUBLISHED = "baseline_published"
    OPEN = "open"
    LOCKED = "locked"
    VERIFIED = "verified"


class EventKind(str, Enum):
    CREATED = "created"
    BASELINE_SET = "baseline_set"
    OPENED = "opened"
    SUBMISSION_ACCEPTED = "submission_accepted"
    LOCKED = "locked"
    OBSERVATION_SET = "observation_set"
    SCORED = "scored"


@dataclass(frozen=True)
class Submission:
    """A player's stored entry: per-threshold and per-bin credit allocations.

    Opted-out sides are materialized at acceptance time into the all-in
    allocation implied by the player's deterministic forecast, so scoring
    is uniform afterwards.
    """

    player_id: str
    game_id: str
    game1: dict[VariableKind, dict[str, CreditAllocation]]
    game2: dict[VariableKind, CreditAllocation]
    deterministic: dict[VariableKind, Decimal]
    opted_out: dict[str, bool]
    submitted_at: datetime

    def to_payload(self) -> dict:
        return {
            "deterministic": {k.value: str(v) for k, v in sorted(self.deterministic.items())},
            "game1": {
                k.value: {label: alloc.to_payload() for label, alloc in sorted(by_q.items())}
                for k, by_q in sorted(self.game1.items())
            },
            "game2": {k.value: alloc.to_payload() for k, alloc in sorted(self.game2.items())},
            "game_id": self.game_id,
            "opted_out": {"game1": self.opted_out["game1"], "game2": self.opted_out["game2"]},
            "player_id": self.player_id,
            "submitted_at": fmt_ts(self.submitted_at),
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "Submission":
        return cls(
            player_id=payload["player_id"],
            game_id=payload["game_id"],
            game1={
                VariableKind(k): {
                    label: CreditAllocation(tuple(c)) for label, c in by_q.items()
                }
                for k, by_q in payload.get("game1", {}).items()
            },
            game2={
                VariableKind(k): CreditAllocation(tuple(c))
                for k, c in payload.get("game2", {}).items()
            },
            deterministic={
                VariableKind(k): Decimal(v)
                for k, v in payload.get("deterministic", {}).items()
            },
            opted_out={
                "game1": bool(payload.get("opted_out", {}).get("game1", False)),
                "game2": bool(payload.get("opted_out", {}).get("game2", False)),
            },
            submitted_at=parse_ts(payload["submitted_at"]),
        )


@dataclass
class Game:
    id: str
    site: str
    forecast_day: date
    deadline: datetime
    state: GameState = GameState.DRAFT
    baselines: dict[VariableKind, BaselineSpec] = field(default_factory=dict)
    submissions: dict[str, Submission] = field(default_factory=dict)
    observations: dict[VariableKind, Observation] = field(default_factory=dict)
    scores: list[dict] = field(default_factory=list)
    legacy: list[dict] = field(default_factory=list)

    def public_payload(self) -> dict:
        return {
            "baseline": (
                {k.value: spec.to_payload() for k, spec in sorted(self.baselines.items())}
                if self.baselines
                else None
            ),
            "deadline": fmt_ts(self.deadline),
            "forecast_day": self.forecast_day.isoformat(),
            "id": self.id,
            "site": self.site,
            "state": self.state.value,
        }

    def snapshot_payload(self) -> dict:
        payload = self.public_payload()
        payload["legacy"] = list(self.legacy)
        payload["observations"] = {
            k.value: o.to_payload() for k, o in sorted(self.observations.items())
        }
        payload["scores"] = list(self.scores)
        payload["submissions"] = {
            pid: sub.to_payload() for pid, sub in sorted(self.submissions.items())
        }
        return payload


def default_deadline(forecast_day: date) -> datetime:
    """Submissions close at 0000 UTC on the forecast day."""
    return datetime.combine(forecast_day, time(0, 0), tzinfo=timezone.utc)


class ContestEngine:
    """Single-writer engine over an append-only event log.

    All mutating operations validate against current state, append exactly
    one event (fsynced when file-backed), then apply it; replay uses the same
    apply path, so live state and replayed state cannot diverge.
    """

    def __init__(self, log_path: str | Path | None = None):
        self.games: dict[str, Game] = {}
        self.next_seq = 1
        self._log_path = Path(log_path) if log_path is not None else None
        self._log_file: IO[str] | None = None
        if self._log_path is not None:
            if self._log_path.exists():
                self._replay_file(self._log_path)
            self._log_file = self._log_path.open("a", encoding="utf-8")

    # ------------------------------------------------------------------ log

    @classmethod
    def replay(cls, log_path: str | Path) -> "ContestEngine":
        """Rebuild engine state from an existing log without reopening it for writes."""
        engine = cls(log_path=None)
        engine._replay_file(Path(log_path))
        return engine

    def _replay_file(self, path: Path) -> None:
        with path.open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    event = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise CorruptLog(f"{path}:{lineno}: bad JSON ({exc.msg})") from None
                if not isinstance(event, dict) or not {"seq", "kind", "payload", "ts"} <= set(event):
                    raise CorruptLog(f"{path}:{lineno}: missing event fields")
                if event["seq"] != self.next_seq:
                    raise CorruptLog(
                        f"{path}:{lineno}: expected seq {self.next_seq}, got {event['seq']}"
                    )
                try:
                    kind = EventKind(event["kind"])
                except ValueError:
                    raise CorruptLog(f"{path}:{lineno}: unknown event kind {event['kind']!r}") from None
                try:
                    self._apply(kind, event["payload"])
                except (WrongState, GameNotOpen, AlreadyVerified, UnknownGame) as exc:
                    raise ConflictingEvent(f"{path}:{lineno}: {exc}") from None
                self.next_seq += 1

    def _append(self, kind: EventKind, payload: dict, ts: datetime) -> dict:
        event = {"kind": kind.value, "payload": payload, "seq": self.next_seq, "ts": fmt_ts(ts)}
        if self._log_file is not None:
            self._log_file.write(canonical_json(event) + "\n")
            self._log_file.flush()
            os.fsync(self._log_file.fileno())
        self._apply(kind, payload)
        self.next_seq += 1
        return event

    def close(self) -> None:
        if self._log_file is not None:
            self._log_file.close()
            self._log_file = None

    # ---------------------------------------------------------------- apply

    def _apply(self, kind: EventKind, payload: dict) -> None:
        if kind is EventKind.CREATED:
            gid = payload["game_id"]
            if gid in self.games:
                raise WrongState(f"game {gid} already exists")
            self.games[gid] = Game(
                id=gid,
                site=payload["site"],
                forecast_day=date.fromisoformat(payload["forecast_day"]),
                deadline=parse_ts(payload["deadline"]),
            )
            return
        game = self._game(payload["game_id"])
        if kind is EventKind.BASELINE_SET:
            self._require(game, GameState.DRAFT, "publish baseline")
            game.baselines = {
                VariableKind(k): BaselineSpec.from_payload(spec)
                for k, spec in payload["baselines"].items()
            }
            game.state = GameState.BASELINE_PUBLISHED
        elif kind is EventKind.OPENED:
            self._require(game, GameState.BASELINE_PUBLISHED, "open")
            game.state = GameState.OPEN
        elif kind is EventKind.SUBMISSION_ACCEPTED:
            self._require(game, GameState.OPEN, "accept a submission")
            sub = Submission.from_payload(payload["submission"])
            game.submissions[sub.player_id] = sub
        elif kind is EventKind.LOCKED:
            self._require(game, GameState.OPEN, "lock")
            game.state = GameState.LOCKED
        elif kind is EventKind.OBSERVATION_SET:
            self._require(game, GameState.LOCKED, "record observations")
            game.observations = {
                VariableKind(k): Observation.from_payload(o)
                for k, o in payload["observations"].items()
            }
        elif kind is EventKind.SCORED:
            self._require(game, GameState.LOCKED, "score")
            game.scores = list(payload["records"])
            game.legacy = list(payload["legacy"])
            game.state = GameState.VERIFIED
        else:  # pragma: no cover - enum is exhaustive
            raise WrongState(f"unhandled event kind {kind}")

    @staticmethod
    def _require(game: Game, state: GameState, action: str) -> None:
        if game.state is not state:
            raise WrongState(
                f"cannot {action} for game {game.id} in state {game.state.value}"
            )

    def _game(self, game_id: str) -> Game:
        try:
            return self.games[game_id]
        except KeyError:
            raise UnknownGame(f"no game {game_id}") from None

    # ------------------------------------------------------------- commands

    def create_game(
        self,
        game_id: str,
        site: str,
        forecast_day: date,
        *,
        ts: datetime,
        deadline: datetime | None = None,
    ) -> Game:
        if game_id in self.games:
            raise WrongState(f"game {game_id} already exists")
        payload = {
            "deadline": fmt_ts(deadline or default_deadline(forecast_day)),
            "forecast_day": forecast_day.isoformat(),
            "game_id": game_id,
            "site": site,
        }
        self._append(EventKind.CREATED, payload, ts)
        return self._game(game_id)

    def set_baseline(
        self, game_id: str, baselines: dict[VariableKind, BaselineSpec], *, ts: datetime
    ) -> Game:
        game = self._game(game_id)
        self._require(game, GameState.DRAFT, "publish baseline")
        payload = {
            "baselines": {k.value: b.to_payload() for k, b in sorted(baselines.items())},
            "game_id": game_id,
        }
        self._append(EventKind.BASELINE_SET, payload, ts)
        return game

    def open_game(self, game_id: str, *, ts: datetime) -> Game:
        game = self._game(game_id)
        self._require(game, GameState.BASELINE_PUBLISHED, "open")
        self._append(EventKind.OPENED, {"game_id": game_id}, ts)
        return game

    def submit(self, game_id: str, entry: dict, *, now: datetime) -> Submission:
        """Validate and store a submission; later submissions replace earlier ones."""
        game = self._game(game_id)
        if game.state in (GameState.DRAFT, GameState.BASELINE_PUBLISHED):
            raise GameNotOpen(f"game {game_id} is not open yet")
        if game.state in (GameState.LOCKED, GameState.VERIFIED):
            raise DeadlinePassed(f"game {game_id} is locked")
        if now >= game.deadline:
            raise DeadlinePassed(f"deadline {fmt_ts(game.deadline)} has passed")
        sub = self._materialize(game, entry, now)
        self._append(
            EventKind.SUBMISSION_ACCEPTED,
            {"game_id": game_id, "submission": sub.to_payload()},
            now,
        )
        return sub

    def _materialize(self, game: Game, entry: dict, now: datetime) -> Submission:
        player_id = entry.get("player_id")
        if not player_id or not isinstance(player_id, str):
            raise InvalidAllocation("submission needs a player_id")
        opted_out = {
            "game1": bool(entry.get("opted_out", {}).get("game1", False)),
            "game2": bool(entry.get("opted_out", {}).get("game2", False)),
        }
        deterministic: dict[VariableKind, Decimal] = {}
        for k, v in (entry.get("deterministic") or {}).items():
            kind = self._kind(k)
            try:
                value = quantize_to_resolution(Decimal(str(v)), VariableSpec.for_kind(kind))
            except (InvalidOperation, ValueError):
                raise InvalidAllocation(f"bad deterministic value {v!r} for {k}") from None
            deterministic[kind] = value

        game1: dict[VariableKind, dict[str, CreditAllocation]] = {}
        game2: dict[VariableKind, CreditAllocation] = {}
        if opted_out["game1"] or opted_out["game2"]:
            if not deterministic:
                raise InvalidAllocation("opting out requires a deterministic forecast")
        if opted_out["game1"]:
            game1 = self._game1_from_deterministic(game, deterministic)
        else:
            for k, by_q in (entry.get("game1") or {}).items():
                kind = self._kind(k)
                if kind not in game.baselines:
                    raise InvalidAllocation(f"no baseline published for {k}")
                labels = {t.label for t in game.baselines[kind].thresholds}
                game1[kind] = {}
                for label, credits in by_q.items():
                    if label not in labels:
                        raise InvalidAllocation(f"unknown threshold {label!r} for {k}")
                    game1[kind][label] = self._alloc(credits, 2)
        if opted_out["game2"]:
            game2 = self._game2_from_deterministic(game, deterministic)
        else:
            for k, credits in (entry.get("game2") or {}).items():
                kind = self._kind(k)
                if kind not in game.baselines:
                    raise InvalidAllocation(f"no baseline published for {k}")
                game2[kind] = self._alloc(credits, len(game.baselines[kind].bins))
        return Submission(
            player_id=player_id,
            game_id=game.id,
            game1=game1,
            game2=game2,
            deterministic=deterministic,
            opted_out=opted_out,
            submitted_at=now,
        )

    @staticmethod
    def _kind(raw: str) -> VariableKind:
        try:
            return VariableKind(raw)
        except ValueError:
            raise InvalidAllocation(f"unknown variable {raw!r}") from None

    @staticmethod
    def _alloc(credits, arity: int) -> CreditAllocation:
        if not isinstance(credits, (list, tuple)):
            raise InvalidAllocation(f"credits must be a list, got {type(credits).__name__}")
        alloc = CreditAllocation(tuple(credits))
        if alloc.arity != arity:
            raise InvalidAllocation(f"expected arity {arity}, got {alloc.arity}")
        return alloc

    @staticmethod
    def _game1_from_deterministic(
        game: Game, deterministic: dict[VariableKind, Decimal]
    ) -> dict[VariableKind, dict[str, CreditAllocation]]:
        out: dict[VariableKind, dict[str, CreditAllocation]] = {}
        for kind, value in deterministic.items():
            spec = game.baselines.get(kind)
            if spec is None:
                continue
            out[kind] = {}
            for t in spec.thresholds:
                credits = (100, 0) if value > t.value else (0, 100)
                out[kind][t.label] = CreditAllocation(credits)
        return out

    @staticmethod
    def _game2_from_deterministic(
        game: Game, deterministic: dict[VariableKind, Decimal]
    ) -> dict[VariableKind, CreditAllocation]:
        out: dict[VariableKind, CreditAllocation] = {}
        for kind, value in deterministic.items():
            spec = game.baselines.get(kind)
            if spec is None:
                continue
            bin_k = spec.bin_index(value)
            credits = [0] * len(spec.bins)
            credits[bin_k] = 100
            out[kind] = CreditAllocation(tuple(credits))
        return out

    def lock(self, game_id: str, *, ts: datetime) -> Game:
        game = self._game(game_id)
        self._require(game, GameState.OPEN, "lock")
        self._append(EventKind.LOCKED, {"game_id": game_id}, ts)
        return game

    def set_observations(
        self, game_id: str, observations: dict[VariableKind, Observation], *, ts: datetime
    ) -> Game:
        game = self._game(game_id)
        self._require(game, GameState.LOCKED, "record observations")
        payload = {
            "game_id": game_id,
            "observations": {k.value: o.to_payload() for k, o in sorted(observations.items())},
        }
        self._append(EventKind.OBSERVATION_SET, payload, ts)
        return game

    def verify(self, game_id: str, *, ts: datetime) -> list[dict]:
        """Score every submission against the observations and freeze the game."""
        game = self._game(game_id)
        if game.state is GameState.VERIFIED:
            raise AlreadyVerified(f"game {game_id} already verified")
        self._require(game, GameState.LOCKED, "verify")
        missing = [
            k.value
            for k in sorted(game.baselines, key=lambda k: k.value)
            if k not in game.observations
        ]
        if missing:
            raise MissingObservation(f"no observation for {', '.join(missing)}")
        records, legacy = _score_game(game)
        self._append(
            EventKind.SCORED, {"game_id": game_id, "legacy": legacy, "records": records}, ts
        )
        return records

    # -------------------------------------------------------------- queries

    def scores_payload(self, game_id: str) -> dict:
        game = self._game(game_id)
        players: dict[str, dict] = {}
        for pid in sorted(game.submissions):
            stats = _player_means(r for r in game.scores if r["player_id"] == pid)
            players[pid] = stats
        return {
            "game_id": game.id,
            "legacy": list(game.legacy),
            "players": players,
            "records": list(game.scores),
            "state": game.state.value,
        }

    def leaderboard(self) -> dict:
        """Players ranked by overall mean bits across all verified games."""
        by_player: dict[str, list[dict]] = {}
        for game in self.games.values():
            if game.state is not GameState.VERIFIED:
                continue
            for record in game.scores:
                by_player.setdefault(record["player_id"], []).append(record)
        rows = []
        for pid, records in by_player.items():
            stats = _player_means(records)
            if stats["n_events"] == 0:
                continue
            stats["player_id"] = pid
            rows.append(stats)
        rows.sort(key=lambda r: (-float(r["mean_bits"]), -r["n_events"], r["player_id"]))
        return {"rows": rows}

    def player_records(self, player_id: str) -> dict[str, list[tuple[float, int]]]:
        """Binary (issued probability, outcome) streams for diagnostics.

        Game 1 contributes the over-side probability against the exceedance
        outcome; game 2 contributes ten one-vs-rest streams per event.
        """
        game1: list[tuple[float, int]] = []
        game2: list[tuple[float, int]] = []
        for gid in sorted(self.games):
            game = self.games[gid]
            if game.state is not GameState.VERIFIED:
                continue
            for r in game.scores:
                if r["player_id"] != player_id:
                    continue
                if r["game"] == "game1" and not r["pushed"]:
                    f = float(r["f"])
                    f_over = f if r["verified_over"] else 1.0 - f
                    game1.append((f_over, 1 if r["verified_over"] else 0))
                elif r["game"] == "game2":
                    for k, f_k in enumerate(r["f_bins"]):
                        game2.append((float(f_k), 1 if k == r["observed_bin"] else 0))
        return {"game1": game1, "game2": game2}

    def diagnostics_payload(self, player_id: str) -> dict:
        streams = self.player_records(player_id)
        if not streams["game1"] and not streams["game2"]:
            raise UnknownPlayer(f"no scored records for player {player_id}")
        payload: dict = {"player_id": player_id}
        for name, records in streams.items():
            if records:
                payload[name] = {
                    "decomposition": decompose(records).to_payload(),
                    "reliability_curve": [p.to_payload() for p in reliability_curve(records)],
                }
            else:
                payload[name] = None
        return payload

    def state_hash(self) -> str:
        snapshot = {
            "games": {gid: self.games[gid].snapshot_payload() for gid in sorted(self.games)},
            "next_seq": self.next_seq,
        }
        return hashlib.sha256(canonical_json(snapshot).encode("utf-8")).hexdigest()


def _score_game(game: Game) -> tuple[list[dict], list[dict]]:
    records: list[dict] = []
    legacy: list[dict] = []
    for pid in sorted(game.submissions):
        sub = game.submissions[pid]
        for kind in sorted(sub.game1, key=lambda k: k.value):
            spec = game.baselines[kind]
            obs = game.observations[kind]
            for t in spec.thresholds:
                alloc = sub.game1[kind].get(t.label)
                if alloc is None:
                    continue
                score = score_over_under(alloc, t.value, t.b_over, obs, spec.clamp)
                record = {
                    "event_id": f"{kind.value}:{t.label}",
                    "game": "game1",
                    "player_id": pid,
                    "variable": kind.value,
                }
                record.update(score.to_payload())
                records.append(record)
        for kind in sorted(sub.game2, key=lambda k: k.value):
            spec = game.baselines[kind]
            obs = game.observations[kind]
            pmf = credits_to_pmf(sub.game2[kind], spec.clamp)
            observed_bin = spec.bin_index(obs.value, obs.trace)
            score = ranked_info_gain(pmf, spec.bin_pmf(), observed_bin)
            record = {
                "event_id": f"{kind.value}:bins",
                "f_bins": [fmt_float(p) for p in pmf.probs],
                "game": "game2",
                "player_id": pid,
                "pushed": False,
                "variable": kind.value,
            }
            record.update(score.to_payload())
            records.append(record)
        for kind in sorted(sub.deterministic, key=lambda k: k.value):
            spec = VariableSpec.for_kind(kind)
            obs = game.observations[kind]
            score = legacy_error_points(sub.deterministic[kind], obs, spec)
            legacy.append(
                {
                    "error_points": str(score.error_points),
                    "forecast": str(sub.deterministic[kind]),
                    "kind": kind.value,
                    "observed": str(obs.value),
                    "player_id": pid,
                    "trace": obs.trace,
                }
            )
    return records, legacy


def _player_means(records: Iterable[dict]) -> dict:
    g1 = []
    g2 = []
    for r in records:
        if r.get("pushed"):
            continue
        bits = float(r["bits"])
        (g1 if r["game"] == "game1" else g2).append(bits)
    combined = g1 + g2
    return {
        "mean_bits": fmt_float(sum(combined) / len(combined)) if combined else None,
        "mean_bits_game1": fmt_float(sum(g1) / len(g1)) if g1 else None,
        "mean_bits_game2": fmt_float(sum(g2) / len(g2)) if g2 else None,
        "n_events": len(combined),
    }
