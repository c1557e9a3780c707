"""Shared fixtures: deterministic ensembles, baselines, and game drivers."""

from __future__ import annotations

from datetime import date, datetime, timezone
from decimal import Decimal

import pytest

from wxbits.baseline import SuperensembleSample, build_baseline
from wxbits.core import Observation, VariableKind, VariableSpec
from wxbits.engine import ContestEngine

RUN_TS = datetime(2023, 10, 1, 12, tzinfo=timezone.utc)
OPEN_TS = datetime(2023, 10, 1, 12, 5, tzinfo=timezone.utc)
SUBMIT_TS = datetime(2023, 10, 1, 18, 0, tzinfo=timezone.utc)
DEADLINE = datetime(2023, 10, 2, 0, 0, tzinfo=timezone.utc)
LOCK_TS = DEADLINE
OBS_TS = datetime(2023, 10, 3, 0, 30, tzinfo=timezone.utc)
VERIFY_TS = datetime(2023, 10, 3, 1, 0, tzinfo=timezone.utc)
FORECAST_DAY = date(2023, 10, 2)

# 20 distinct degrees: every empirical baseline probability is a multiple of
# 1/20, i.e. on the credit lattice, so baseline-equal allocations score
# exactly zero bits.
TEMP_VALUES_20 = list(range(51, 71))


def make_samples(kind: str, values) -> list[SuperensembleSample]:
    spec = VariableSpec.for_kind(kind)
    return [
        SuperensembleSample(
            member_id=f"m:{i}", variable=spec, value=Decimal(str(v)), run_time=RUN_TS
        )
        for i, v in enumerate(values)
    ]


def temp_baselines():
    return {
        VariableKind.TEMP_MAX: build_baseline(
            make_samples("temp_max", TEMP_VALUES_20), published_at=RUN_TS
        )
    }


def temp_observation(value, day=FORECAST_DAY) -> Observation:
    return Observation(
        variable=VariableSpec.for_kind("temp_max"), value=Decimal(str(value)), valid_day=day
    )


def advance(engine: ContestEngine, game_id: str, target: str, obs_value="66"):
    """Drive a fresh game along the legal path up to ``target`` state."""
    engine.create_game(game_id, site="KOUN", forecast_day=FORECAST_DAY, ts=RUN_TS)
    if target == "draft":
        return
    engine.set_baseline(game_id, temp_baselines(), ts=RUN_TS)
    if target == "baseline_published":
        return
    engine.open_game(game_id, ts=OPEN_TS)
    if target == "open":
        return
    engine.submit(game_id, baseline_equal_entry("alice"), now=SUBMIT_TS)
    engine.lock(game_id, ts=LOCK_TS)
    if target == "locked":
        return
    engine.set_observations(
        game_id, {VariableKind.TEMP_MAX: temp_observation(obs_value)}, ts=OBS_TS
    )
    if target == "locked_with_obs":
        return
    engine.verify(game_id, ts=VERIFY_TS)


def baseline_equal_entry(player_id: str) -> dict:
    """Credits matching the N=20 fixture's baseline probabilities exactly."""
    return {
        "player_id": player_id,
        "game1": {"temp_max": {"q50": [45, 55], "q90": [10, 90]}},
        "game2": {"temp_max": [10, 10, 10, 10, 10, 5, 10, 10, 10, 15]},
        "deterministic": {"temp_max": "61"},
    }


@pytest.fixture
def engine():
    return ContestEngine(log_path=None)
