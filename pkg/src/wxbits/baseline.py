"""Superensemble baseline construction.

From the 1200 UTC pooled point forecasts (HRRR/NAM/GFS/GEFS members treated
as one equal-weight ensemble) this module derives, per variable:

* over/under thresholds at the 50th and 90th percentiles, each published
  with the empirical exceedance probability of the rounded threshold, and
* ten bins bounded by quantized deciles, each published with the clamped,
  renormalized empirical member mass.

Published ``BaselineSpec`` artifacts are immutable and serialize
byte-identically across runs from the same input.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from datetime import datetime
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Iterable, Sequence

from .core import (
    Clamp,
    Pmf,
    VariableKind,
    VariableSpec,
    clamp_pmf,
    fmt_float,
    fmt_ts,
    parse_ts,
    quantize_to_resolution,
)
from .errors import (
    DegenerateEnsemble,
    EmptyInput,
    InsufficientMembers,
    ParseError,
    SchemaError,
)

GAME1_QUANTILES = (Decimal("0.5"), Decimal("0.9"))
BIN_COUNT = 10
LEAD_WINDOW = "12-36h"

MEMBER_CSV_HEADER = ["run_time", "model", "member", "variable", "value", "trace"]


@dataclass(frozen=True)
class SuperensembleSample:
    """One pooled-member point forecast for one variable."""

    member_id: str
    variable: VariableSpec
    value: Decimal
    run_time: datetime
    trace: bool = False
    lead_window: str = LEAD_WINDOW

    def __post_init__(self):
        if not self.value.is_finite():
            raise ParseError(f"non-finite member value {self.value!r}")
        if self.variable.nonnegative and self.value < 0:
            raise ParseError(f"{self.variable.kind.value} member value cannot be negative")


def percentile(values: Sequence[float | Decimal], q: float) -> float:
    """Linear-interpolation percentile at rank q*(n-1) over the sorted sample."""
    if len(values) == 0:
        raise EmptyInput("percentile of an empty sample")
    if not 0.0 <= q <= 1.0:
        raise EmptyInput(f"quantile {q} outside [0, 1]")
    ordered = sorted(float(v) for v in values)
    h = q * (len(ordered) - 1)
    lo = math.floor(h)
    frac = h - lo
    if lo + 1 >= len(ordered) or frac == 0.0:
        return ordered[lo]
    return ordered[lo] + frac * (ordered[lo + 1] - ordered[lo])


@dataclass(frozen=True)
class BaselineThreshold:
    """One over/under line: quantized threshold plus baseline exceedance probability."""

    q: Decimal
    value: Decimal
    b_over: float

    @property
    def label(self) -> str:
        return f"q{int(self.q * 100)}"

    def to_payload(self) -> dict:
        return {"b_over": fmt_float(self.b_over), "q": str(self.q), "value": str(self.value)}

    @classmethod
    def from_payload(cls, payload: dict) -> "BaselineThreshold":
        return cls(
            q=Decimal(payload["q"]),
            value=Decimal(payload["value"]),
            b_over=float(payload["b_over"]),
        )


@dataclass(frozen=True)
class BaselineBin:
    """Half-open bin [low, high) with its baseline mass; None edges are unbounded."""

    low: Decimal | None
    high: Decimal | None
    mass: float

    def to_payload(self) -> dict:
        return {
            "high": None if self.high is None else str(self.high),
            "low": None if self.low is None else str(self.low),
            "mass": fmt_float(self.mass),
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "BaselineBin":
        return cls(
            low=None if payload["low"] is None else Decimal(payload["low"]),
            high=None if payload["high"] is None else Decimal(payload["high"]),
            mass=float(payload["mass"]),
        )


@dataclass(frozen=True)
class BaselineSpec:
    """Frozen per-variable baseline artifact for both games."""

    variable: VariableSpec
    n_members: int
    thresholds: tuple[BaselineThreshold, ...]
    bins: tuple[BaselineBin, ...]
    clamp: Clamp
    published_at: datetime

    def bin_pmf(self) -> Pmf:
        return Pmf(probs=tuple(b.mass for b in self.bins), clamp=self.clamp)

    def bin_index(self, value: Decimal, trace: bool = False) -> int:
        """Bin containing the value; trace precipitation maps to bin 0."""
        if trace:
            return 0
        for k, b in enumerate(self.bins):
            low_ok = b.low is None or value >= b.low
            high_ok = b.high is None or value < b.high
            if low_ok and high_ok:
                return k
        return len(self.bins) - 1

    def to_payload(self) -> dict:
        return {
            "bins": [b.to_payload() for b in self.bins],
            "clamp": self.clamp.to_payload(),
            "n_members": self.n_members,
            "published_at": fmt_ts(self.published_at),
            "thresholds": [t.to_payload() for t in self.thresholds],
            "variable": self.variable.to_payload(),
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "BaselineSpec":
        return cls(
            variable=VariableSpec.for_kind(payload["variable"]["kind"]),
            n_members=int(payload["n_members"]),
            thresholds=tuple(BaselineThreshold.from_payload(t) for t in payload["thresholds"]),
            bins=tuple(BaselineBin.from_payload(b) for b in payload["bins"]),
            clamp=Clamp.from_payload(payload["clamp"]),
            published_at=parse_ts(payload["published_at"]),
        )


def _member_values(samples: Sequence[SuperensembleSample]) -> list[Decimal]:
    kinds = {s.variable.kind for s in samples}
    if len(kinds) > 1:
        raise SchemaError(f"samples mix variables: {sorted(k.value for k in kinds)}")
    runs = {s.run_time for s in samples}
    if len(runs) > 1:
        raise SchemaError("samples mix run times")
    return [s.value for s in samples]


def build_game1_thresholds(
    samples: Sequence[SuperensembleSample], clamp_factor: float = 4.0
) -> tuple[BaselineThreshold, ...]:
    """Thresholds at the 50th/90th percentiles with empirical exceedance odds.

    The exceedance probability is recomputed by counting members strictly
    above the *rounded* threshold, so rounding drift away from the nominal
    0.5/0.1 is corrected, then clamped into the binary bounds.
    """
    values = _member_values(samples)
    if len(values) < 2:
        raise InsufficientMembers(f"need at least 2 members, got {len(values)}")
    spec = samples[0].variable
    binary = Clamp.for_members(len(values), arity=2, factor=clamp_factor)
    out = []
    for q in GAME1_QUANTILES:
        threshold = quantize_to_resolution(percentile(values, float(q)), spec)
        exceed = sum(1 for v in values if v > threshold)
        out.append(
            BaselineThreshold(q=q, value=threshold, b_over=binary.bound(exceed / len(values)))
        )
    return tuple(out)


def build_game2_bins(
    samples: Sequence[SuperensembleSample], clamp_factor: float = 4.0
) -> tuple[tuple[BaselineBin, ...], Clamp]:
    """Ten bins bounded by quantized member deciles, with clamped empirical mass.

    Duplicate edges after quantization are repaired by nudging one resolution
    step upward so the partition stays strictly increasing. The outer bins are
    unbounded (low of bin 0 is the variable's support floor, if any).
    """
    values = _member_values(samples)
    if len(values) < BIN_COUNT:
        raise DegenerateEnsemble(f"need at least {BIN_COUNT} members, got {len(values)}")
    if len(set(values)) < 2:
        raise DegenerateEnsemble("ensemble has no spread; bins undefined")
    spec = samples[0].variable
    clamp = Clamp.for_members(len(values), arity=BIN_COUNT, factor=clamp_factor)

    edges = [
        quantize_to_resolution(percentile(values, k / BIN_COUNT), spec)
        for k in range(1, BIN_COUNT)
    ]
    for i in range(1, len(edges)):
        if edges[i] <= edges[i - 1]:
            edges[i] = edges[i - 1] + spec.resolution

    floor = Decimal("0").quantize(spec.resolution) if spec.nonnegative else None
    lows: list[Decimal | None] = [floor] + list(edges)
    highs: list[Decimal | None] = list(edges) + [None]

    counts = [0] * BIN_COUNT
    for v in values:
        counts[_locate(v, edges)] += 1
    masses = clamp_pmf([c / len(values) for c in counts], clamp)
    bins = tuple(
        BaselineBin(low=lo, high=hi, mass=m) for lo, hi, m in zip(lows, highs, masses)
    )
    return bins, clamp


def _locate(value: Decimal, edges: Sequence[Decimal]) -> int:
    for k, edge in enumerate(edges):
        if value < edge:
            return k
    return len(edges)


def build_baseline(
    samples: Sequence[SuperensembleSample],
    published_at: datetime,
    clamp_factor: float = 4.0,
) -> BaselineSpec:
    """Full per-variable baseline: thresholds plus bins from one member pool."""
    values = _member_values(samples)
    bins, clamp = build_game2_bins(samples, clamp_factor)
    return BaselineSpec(
        variable=samples[0].variable,
        n_members=len(values),
        thresholds=build_game1_thresholds(samples, clamp_factor),
        bins=bins,
        clamp=clamp,
        published_at=published_at,
    )


def build_baselines(
    samples: Iterable[SuperensembleSample],
    published_at: datetime,
    clamp_factor: float = 4.0,
) -> dict[VariableKind, BaselineSpec]:
    """Group a mixed-variable member pool and build one baseline per variable."""
    grouped: dict[VariableKind, list[SuperensembleSample]] = {}
    for s in samples:
        grouped.setdefault(s.variable.kind, []).append(s)
    if not grouped:
        raise EmptyInput("no member samples")
    return {
        kind: build_baseline(group, published_at, clamp_factor)
        for kind, group in sorted(grouped.items(), key=lambda kv: kv[0].value)
    }


def ingest_members(path: str | Path) -> list[SuperensembleSample]:
    """Parse and validate a member CSV file; see :func:`parse_members_csv`."""
    path = Path(path)
    return parse_members_csv(path.read_text(encoding="utf-8"), source=str(path))


def parse_members_csv(text: str, source: str = "<inline>") -> list[SuperensembleSample]:
    """Parse and validate member CSV content.

    Schema: header ``run_time,model,member,variable,value,trace``; UTF-8,
    comma-separated, ``.`` decimal point. Rows with unknown variables,
    non-finite or negative-precipitation values are rejected with their line
    number; a missing or malformed header is a schema error.
    """
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError(f"{source}: empty member file") from None
    if [h.strip() for h in header] != MEMBER_CSV_HEADER:
        raise SchemaError(
            f"{source}: header must be {','.join(MEMBER_CSV_HEADER)}, got {','.join(header)}"
        )
    samples = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(MEMBER_CSV_HEADER):
            raise ParseError(f"expected {len(MEMBER_CSV_HEADER)} columns, got {len(row)}", lineno)
        samples.append(_parse_row(row, lineno))
    if not samples:
        raise SchemaError(f"{source}: no member rows")
    return samples


def _parse_row(row: list[str], lineno: int) -> SuperensembleSample:
    run_time_raw, model, member, variable, value_raw, trace_raw = (c.strip() for c in row)
    try:
        run_time = parse_ts(run_time_raw) if "T" in run_time_raw else datetime.fromisoformat(
            run_time_raw + "T12:00:00+00:00"
        )
    except ValueError:
        raise ParseError(f"bad run_time {run_time_raw!r}", lineno) from None
    try:
        spec = VariableSpec.for_kind(variable)
    except ValueError:
        raise ParseError(f"unknown variable {variable!r}", lineno) from None
    try:
        value = Decimal(value_raw)
    except InvalidOperation:
        raise ParseError(f"bad decimal {value_raw!r}", lineno) from None
    if not value.is_finite():
        raise ParseError(f"non-finite value {value_raw!r}", lineno)
    trace = trace_raw.lower() in ("1", "true", "t", "yes")
    if trace_raw.lower() not in ("", "0", "1", "true", "false", "t", "f", "yes", "no"):
        raise ParseError(f"bad trace flag {trace_raw!r}", lineno)
    try:
        return SuperensembleSample(
            member_id=f"{model}:{member}",
            variable=spec,
            value=value,
            run_time=run_time,
            trace=trace,
        )
    except ParseError as exc:
        raise ParseError(str(exc), lineno) from None
