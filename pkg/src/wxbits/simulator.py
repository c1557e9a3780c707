"""Synthetic truth and player populations for property tests and seed data.

Each simulated day draws a true distribution per variable, samples a
superensemble from it, publishes baselines, generates submissions from a
population of players with tunable calibration and sharpness, samples the
observation from the truth, and verifies through the real engine. Runs are
fully reproducible for a fixed seed (per-day RNG substreams, synthetic
clock).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date, datetime, time, timedelta, timezone
from decimal import Decimal
from enum import Enum
from pathlib import Path
from typing import Sequence

import numpy as np

from .baseline import BaselineSpec, SuperensembleSample, build_baselines
from .core import (
    Observation,
    VariableKind,
    VariableSpec,
    quantize_to_resolution,
)
from .engine import ContestEngine
from .errors import ConfigError


class Strategy(str, Enum):
    HONEST = "honest"
    HEDGER = "hedger"
    ALL_IN = "all_in"


@dataclass(frozen=True)
class SyntheticPlayer:
    """Calibration lambda: 1 reproduces the truth, <1 shrinks toward the
    baseline, >1 sharpens past it. Skill sigma adds logit-space noise."""

    id: str
    calibration: float = 1.0
    skill: float = 0.0
    strategy: Strategy = Strategy.HONEST

    def __post_init__(self):
        if not 0.0 <= self.calibration <= 2.0:
            raise ConfigError(f"calibration must be in [0, 2], got {self.calibration}")
        if self.skill < 0.0:
            raise ConfigError(f"skill noise must be >= 0, got {self.skill}")


# ----------------------------------------------------------------- truths


@dataclass(frozen=True)
class RoundedNormal:
    """Temperature-like truth: Gaussian rounded to whole degrees."""

    kind: VariableKind
    mu: float
    sigma: float

    def _survival_raw(self, x: float) -> float:
        return 0.5 * math.erfc((x - self.mu) / (self.sigma * math.sqrt(2)))

    def prob_at_least(self, value: float) -> float:
        return self._survival_raw(value - 0.5)

    def sample_raw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.normal(self.mu, self.sigma, size=size)

    def median_raw(self) -> float:
        return self.mu


@dataclass(frozen=True)
class RoundedWeibull:
    """Wind-like truth: right-skewed positive distribution rounded to knots."""

    kind: VariableKind
    shape: float
    scale: float

    def _survival_raw(self, x: float) -> float:
        if x <= 0.0:
            return 1.0
        return math.exp(-((x / self.scale) ** self.shape))

    def prob_at_least(self, value: float) -> float:
        return self._survival_raw(value - 0.5)

    def sample_raw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return self.scale * rng.weibull(self.shape, size=size)

    def median_raw(self) -> float:
        return self.scale * math.log(2) ** (1.0 / self.shape)


@dataclass(frozen=True)
class ZeroInflatedPrecip:
    """Precipitation truth: dry-day point mass plus exponential wet amounts.

    Raw amounts under half the reporting resolution round to 0.00; wet ones
    among them are trace.
    """

    kind: VariableKind
    p_wet: float
    mean: float

    def _survival_raw(self, x: float) -> float:
        if x <= 0.0:
            return 1.0
        return self.p_wet * math.exp(-x / self.mean)

    def prob_at_least(self, value: float) -> float:
        if value <= 0.0:
            return 1.0
        return self._survival_raw(value - 0.005)

    def sample_raw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        wet = rng.random(size) < self.p_wet
        amounts = rng.exponential(self.mean, size=size)
        return np.where(wet, amounts, 0.0)

    def median_raw(self) -> float:
        if self.p_wet <= 0.5:
            return 0.0
        # median of the mixture: solve p_wet * exp(-x/mean) = 0.5
        return self.mean * math.log(2 * self.p_wet)


TruthModel = RoundedNormal | RoundedWeibull | ZeroInflatedPrecip


def prob_over(truth: TruthModel, threshold: Decimal, spec: VariableSpec) -> float:
    """P(quantized value strictly exceeds the threshold)."""
    return truth.prob_at_least(float(threshold) + float(spec.resolution))


def bin_masses(truth: TruthModel, baseline: BaselineSpec) -> list[float]:
    """True probability mass of each published bin for the quantized value."""
    def at_least(edge: Decimal | None, is_low: bool) -> float:
        if edge is None:
            return 1.0 if is_low else 0.0
        return truth.prob_at_least(float(edge))

    masses = []
    for b in baseline.bins:
        masses.append(max(at_least(b.low, True) - at_least(b.high, False), 0.0))
    total = sum(masses)
    return [m / total for m in masses]


def sample_observation(
    truth: TruthModel, spec: VariableSpec, rng: np.random.Generator, day: date
) -> Observation:
    raw = float(truth.sample_raw(rng, 1)[0])
    value = quantize_to_resolution(raw, spec)
    trace = bool(
        spec.kind is VariableKind.PRECIP_ACCUM and raw > 0.0 and value == Decimal("0.00")
    )
    return Observation(variable=spec, value=value, valid_day=day, trace=trace)


# ------------------------------------------------------------ allocation


def lattice_credits(probs: Sequence[float]) -> tuple[int, ...]:
    """Largest-remainder rounding onto the 100-credit lattice; sums to 100."""
    total = math.fsum(probs)
    if total <= 0.0:
        raise ConfigError("probabilities must have positive mass")
    scaled = [100.0 * p / total for p in probs]
    floors = [math.floor(s) for s in scaled]
    short = 100 - sum(floors)
    order = sorted(range(len(scaled)), key=lambda i: (-(scaled[i] - floors[i]), i))
    for i in order[:short]:
        floors[i] += 1
    return tuple(floors)


def blend_binary(p_true: float, b: float, lam: float) -> float:
    """Log-odds interpolation between baseline (lam=0) and truth (lam=1)."""
    w_yes = b ** (1.0 - lam) * p_true**lam
    w_no = (1.0 - b) ** (1.0 - lam) * (1.0 - p_true) ** lam
    return w_yes / (w_yes + w_no)


def blend_pmf(p_true: Sequence[float], b: Sequence[float], lam: float) -> list[float]:
    """Renormalized bin-wise geometric mixture of baseline and truth."""
    weights = [bk ** (1.0 - lam) * pk**lam for pk, bk in zip(p_true, b)]
    total = sum(weights)
    if total <= 0.0:
        raise ConfigError("degenerate mixture: no mass anywhere")
    return [w / total for w in weights]


def _noisy(probs: Sequence[float], sigma: float, rng: np.random.Generator) -> list[float]:
    if sigma == 0.0:
        return list(probs)
    floor = 1e-9
    logs = np.log(np.maximum(probs, floor)) + sigma * rng.standard_normal(len(probs))
    weights = np.exp(logs - logs.max())
    return list(weights / weights.sum())


def make_player_submission(
    player: SyntheticPlayer,
    truths: dict[VariableKind, TruthModel],
    baselines: dict[VariableKind, BaselineSpec],
    rng: np.random.Generator,
) -> dict:
    """Build the submission payload a synthetic player would send."""
    game1: dict[str, dict[str, list[int]]] = {}
    game2: dict[str, list[int]] = {}
    deterministic: dict[str, str] = {}
    for kind in sorted(baselines, key=lambda k: k.value):
        spec_v = VariableSpec.for_kind(kind)
        baseline = baselines[kind]
        truth = truths[kind]
        by_q: dict[str, list[int]] = {}
        for t in baseline.thresholds:
            p = prob_over(truth, t.value, spec_v)
            if player.strategy is Strategy.ALL_IN:
                credits = [100, 0] if p >= 0.5 else [0, 100]
            else:
                f = blend_binary(p, t.b_over, player.calibration)
                f = _noisy([f, 1.0 - f], player.skill, rng)[0]
                credits = list(lattice_credits([f, 1.0 - f]))
            by_q[t.label] = credits
        game1[kind.value] = by_q

        masses = bin_masses(truth, baseline)
        if player.strategy is Strategy.ALL_IN:
            top = max(range(len(masses)), key=lambda k: masses[k])
            bins = [0] * len(masses)
            bins[top] = 100
        else:
            mixed = blend_pmf(masses, [b.mass for b in baseline.bins], player.calibration)
            mixed = _noisy(mixed, player.skill, rng)
            bins = list(lattice_credits(mixed))
        game2[kind.value] = bins

        deterministic[kind.value] = str(
            quantize_to_resolution(truth.median_raw(), spec_v)
        )
    return {
        "deterministic": deterministic,
        "game1": game1,
        "game2": game2,
        "player_id": player.id,
    }


# ----------------------------------------------------------------- season


@dataclass(frozen=True)
class SeasonConfig:
    players: int = 18
    days: int = 125
    seed: int = 7
    site: str = "KOUN"
    n_members: int = 30
    clamp_factor: float = 4.0
    start: date = date(2023, 10, 2)
    member_shift: float = 0.0  # optional ensemble bias, in native units

    def __post_init__(self):
        if self.players < 1:
            raise ConfigError("need at least one player")
        if self.days < 1:
            raise ConfigError("need at least one day")
        if self.n_members < 10:
            raise ConfigError("need at least ten superensemble members")


def make_players(n: int) -> list[SyntheticPlayer]:
    """Deterministic population cycling honest / all-in / hedger."""
    players = []
    for i in range(n):
        kind = (Strategy.HONEST, Strategy.ALL_IN, Strategy.HEDGER)[i % 3]
        if kind is Strategy.HONEST:
            players.append(SyntheticPlayer(id=f"hon{i:03d}", strategy=kind))
        elif kind is Strategy.ALL_IN:
            players.append(SyntheticPlayer(id=f"all{i:03d}", strategy=kind))
        else:
            players.append(
                SyntheticPlayer(id=f"hdg{i:03d}", calibration=0.4, skill=0.3, strategy=kind)
            )
    return players


def draw_truths(rng: np.random.Generator) -> dict[VariableKind, TruthModel]:
    return {
        VariableKind.TEMP_MAX: RoundedNormal(
            VariableKind.TEMP_MAX, mu=float(rng.uniform(50, 90)), sigma=float(rng.uniform(2, 6))
        ),
        VariableKind.TEMP_MIN: RoundedNormal(
            VariableKind.TEMP_MIN, mu=float(rng.uniform(30, 60)), sigma=float(rng.uniform(2, 5))
        ),
        VariableKind.WIND_MAX: RoundedWeibull(
            VariableKind.WIND_MAX,
            shape=float(rng.uniform(1.6, 2.8)),
            scale=float(rng.uniform(8, 22)),
        ),
        VariableKind.PRECIP_ACCUM: ZeroInflatedPrecip(
            VariableKind.PRECIP_ACCUM,
            p_wet=float(rng.uniform(0.25, 0.85)),
            mean=float(rng.uniform(0.05, 0.6)),
        ),
    }


def _member_samples(
    truths: dict[VariableKind, TruthModel],
    config: SeasonConfig,
    rng: np.random.Generator,
    run_time: datetime,
) -> list[SuperensembleSample]:
    samples = []
    for kind in sorted(truths, key=lambda k: k.value):
        spec = VariableSpec.for_kind(kind)
        raw = truths[kind].sample_raw(rng, config.n_members)
        if config.member_shift:
            if kind in (VariableKind.TEMP_MAX, VariableKind.TEMP_MIN):
                raw = raw + config.member_shift
            else:
                raw = raw * (1.0 + config.member_shift)
        raw = np.maximum(raw, 0.0) if spec.nonnegative else raw
        for i, v in enumerate(np.round(raw, 4)):
            samples.append(
                SuperensembleSample(
                    member_id=f"sim:{i:02d}",
                    variable=spec,
                    value=Decimal(f"{v:.4f}"),
                    run_time=run_time,
                )
            )
    return samples


def simulate_season(
    config: SeasonConfig,
    log_path: str | Path | None = None,
    players: list[SyntheticPlayer] | None = None,
) -> ContestEngine:
    """Run a full season through the engine; reproducible for a fixed seed."""
    engine = ContestEngine(log_path=log_path)
    population = players if players is not None else make_players(config.players)
    for d in range(config.days):
        day = config.start + timedelta(days=d)
        publish_ts = datetime.combine(day - timedelta(days=1), time(12), tzinfo=timezone.utc)
        deadline = datetime.combine(day, time(0), tzinfo=timezone.utc)
        obs_ts = datetime.combine(day + timedelta(days=1), time(0, 30), tzinfo=timezone.utc)
        game_id = f"{config.site}-{day.isoformat()}"

        day_rng = np.random.default_rng([config.seed, d])
        truths = draw_truths(day_rng)
        members = _member_samples(truths, config, day_rng, publish_ts)
        baselines = build_baselines(
            members, published_at=publish_ts, clamp_factor=config.clamp_factor
        )

        engine.create_game(
            game_id, site=config.site, forecast_day=day, ts=publish_ts, deadline=deadline
        )
        engine.set_baseline(game_id, baselines, ts=publish_ts)
        engine.open_game(game_id, ts=publish_ts + timedelta(minutes=1))
        submit_ts = publish_ts + timedelta(hours=2)
        for i, player in enumerate(population):
            player_rng = np.random.default_rng([config.seed, d, i])
            entry = make_player_submission(player, truths, baselines, player_rng)
            engine.submit(game_id, entry, now=submit_ts)
        engine.lock(game_id, ts=deadline)

        observations = {
            kind: sample_observation(truths[kind], VariableSpec.for_kind(kind), day_rng, day)
            for kind in sorted(truths, key=lambda k: k.value)
        }
        engine.set_observations(game_id, observations, ts=obs_ts)
        engine.verify(game_id, ts=obs_ts + timedelta(minutes=5))
    engine.close()
    return engine


def strategy_game1_means(engine: ContestEngine) -> dict[str, float]:
    """Pooled mean over/under bits per strategy prefix (hon/all/hdg)."""
    pools: dict[str, list[float]] = {}
    for game in engine.games.values():
        for r in game.scores:
            if r["game"] != "game1" or r["pushed"]:
                continue
            prefix = r["player_id"][:3]
            pools.setdefault(prefix, []).append(float(r["bits"]))
    return {k: math.fsum(v) / len(v) for k, v in pools.items() if v}
