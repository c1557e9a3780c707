"""Domain types, unit conventions, and credit-to-probability conversion.

Contest variables are scored in imperial units at fixed reporting
resolutions (1 degF, 1 kt, 0.01 in). Sensible-weather values are handled as
:class:`decimal.Decimal` so that quantization and JSON golden files are
exact; probabilities and bits are binary-64 floats.

Canonical JSON convention: every non-integer number is serialized as a
string (``repr`` for floats, ``str`` for quantized decimals) so that golden
files and client displays are byte-stable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import date, datetime, timezone
from decimal import Decimal, ROUND_HALF_UP
from enum import Enum
from typing import Sequence

from .errors import DomainError, InfeasibleClamp, InvalidAllocation, UnitMismatch

CREDIT_TOTAL = 100
ALLOWED_ARITIES = (2, 10)


class VariableKind(str, Enum):
    TEMP_MAX = "temp_max"
    TEMP_MIN = "temp_min"
    WIND_MAX = "wind_max"
    PRECIP_ACCUM = "precip_accum"


class Unit(str, Enum):
    DEG_F = "degF"
    KNOT = "knot"
    INCH = "inch"


_KIND_UNIT = {
    VariableKind.TEMP_MAX: Unit.DEG_F,
    VariableKind.TEMP_MIN: Unit.DEG_F,
    VariableKind.WIND_MAX: Unit.KNOT,
    VariableKind.PRECIP_ACCUM: Unit.INCH,
}

_KIND_RESOLUTION = {
    VariableKind.TEMP_MAX: Decimal("1"),
    VariableKind.TEMP_MIN: Decimal("1"),
    VariableKind.WIND_MAX: Decimal("1"),
    VariableKind.PRECIP_ACCUM: Decimal("0.01"),
}

_OPEN_ENDED_HIGH = {
    VariableKind.TEMP_MAX: False,
    VariableKind.TEMP_MIN: False,
    VariableKind.WIND_MAX: True,
    VariableKind.PRECIP_ACCUM: True,
}


@dataclass(frozen=True)
class VariableSpec:
    """One of the four contest variables with its unit and reporting resolution."""

    kind: VariableKind
    unit: Unit
    resolution: Decimal
    open_ended_high: bool

    def __post_init__(self):
        if self.unit is not _KIND_UNIT[self.kind]:
            raise UnitMismatch(f"{self.kind.value} is reported in {_KIND_UNIT[self.kind].value}")
        if self.resolution != _KIND_RESOLUTION[self.kind]:
            raise UnitMismatch(
                f"{self.kind.value} resolution must be {_KIND_RESOLUTION[self.kind]}"
            )

    @classmethod
    def for_kind(cls, kind: VariableKind | str) -> "VariableSpec":
        kind = VariableKind(kind)
        return cls(
            kind=kind,
            unit=_KIND_UNIT[kind],
            resolution=_KIND_RESOLUTION[kind],
            open_ended_high=_OPEN_ENDED_HIGH[kind],
        )

    @property
    def nonnegative(self) -> bool:
        return self.kind in (VariableKind.WIND_MAX, VariableKind.PRECIP_ACCUM)

    def to_payload(self) -> dict:
        return {
            "kind": self.kind.value,
            "open_ended_high": self.open_ended_high,
            "resolution": str(self.resolution),
            "unit": self.unit.value,
        }


VARIABLES: dict[VariableKind, VariableSpec] = {
    kind: VariableSpec.for_kind(kind) for kind in VariableKind
}

ALL_KINDS: tuple[VariableKind, ...] = tuple(VariableKind)


def quantize_to_resolution(value: Decimal | int | float | str, spec: VariableSpec) -> Decimal:
    """Round ``value`` half-away-from-zero to the variable's reporting resolution."""
    dec = _as_decimal(value)
    if not dec.is_finite():
        raise DomainError(f"cannot quantize non-finite value {value!r}")
    steps = (dec / spec.resolution).to_integral_value(rounding=ROUND_HALF_UP)
    return (steps * spec.resolution).quantize(spec.resolution)


def _as_decimal(value: Decimal | int | float | str) -> Decimal:
    if isinstance(value, Decimal):
        return value
    if isinstance(value, float):
        # repr gives the shortest round-trip string, e.g. 26.1 not 26.100000000000001
        return Decimal(repr(value))
    return Decimal(value)


@dataclass(frozen=True)
class Observation:
    """A verified value for one variable over the 0000-2400 UTC day window.

    Observations are treated as certain; ``trace`` marks precipitation that
    fell but was too small to measure (value 0.00).
    """

    variable: VariableSpec
    value: Decimal
    valid_day: date
    trace: bool = False

    def __post_init__(self):
        object.__setattr__(self, "value", quantize_to_resolution(self.value, self.variable))
        if self.trace:
            if self.variable.kind is not VariableKind.PRECIP_ACCUM:
                raise UnitMismatch("trace flag applies only to precipitation")
            if self.value != 0:
                raise UnitMismatch("trace observations must carry value 0")
        if self.variable.nonnegative and self.value < 0:
            raise DomainError(f"{self.variable.kind.value} cannot be negative")

    def to_payload(self) -> dict:
        return {
            "date": self.valid_day.isoformat(),
            "kind": self.variable.kind.value,
            "trace": self.trace,
            "value": str(self.value),
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "Observation":
        spec = VariableSpec.for_kind(payload["kind"])
        return cls(
            variable=spec,
            value=Decimal(payload["value"]),
            valid_day=date.fromisoformat(payload["date"]),
            trace=bool(payload.get("trace", False)),
        )


@dataclass(frozen=True)
class CreditAllocation:
    """A player's 100-credit integer split over a binary or ten-bin outcome space."""

    credits: tuple[int, ...]

    def __post_init__(self):
        credits = tuple(self.credits)
        object.__setattr__(self, "credits", credits)
        if len(credits) not in ALLOWED_ARITIES:
            raise InvalidAllocation(f"arity must be one of {ALLOWED_ARITIES}, got {len(credits)}")
        for c in credits:
            if isinstance(c, bool) or not isinstance(c, int):
                raise InvalidAllocation(f"credits must be integers, got {c!r}")
            if c < 0:
                raise InvalidAllocation(f"credits must be non-negative, got {c}")
        if sum(credits) != CREDIT_TOTAL:
            raise InvalidAllocation(f"credits must sum to {CREDIT_TOTAL}, got {sum(credits)}")

    @property
    def arity(self) -> int:
        return len(self.credits)

    def to_payload(self) -> list[int]:
        return list(self.credits)


@dataclass(frozen=True)
class Clamp:
    """Lower/upper probability bounds keeping log scores finite.

    Default lower bound is 1/(factor*N) for an N-member superensemble; the
    upper bound is the feasibility limit 1 - (arity-1)*p_min.
    """

    p_min: float
    p_max: float

    def __post_init__(self):
        if not (0.0 < self.p_min < self.p_max < 1.0):
            raise InfeasibleClamp(f"need 0 < p_min < p_max < 1, got ({self.p_min}, {self.p_max})")

    @classmethod
    def for_members(cls, n_members: int, arity: int, factor: float = 4.0) -> "Clamp":
        if n_members < 1:
            raise InfeasibleClamp("need at least one ensemble member")
        if factor <= 0:
            raise InfeasibleClamp("clamp factor must be positive")
        p_min = 1.0 / (factor * n_members)
        if p_min * arity >= 1.0:
            raise InfeasibleClamp(
                f"p_min {p_min} infeasible for arity {arity}: p_min*arity >= 1"
            )
        return cls(p_min=p_min, p_max=1.0 - (arity - 1) * p_min)

    def binary(self) -> "Clamp":
        """The arity-2 clamp sharing this clamp's lower bound."""
        return Clamp(p_min=self.p_min, p_max=1.0 - self.p_min)

    def bound(self, p: float) -> float:
        """Clamp one probability of a binary event into [p_min, p_max]."""
        return min(max(p, self.p_min), self.p_max)

    def contains(self, p: float, slack: float = 1e-12) -> bool:
        return self.p_min - slack <= p <= self.p_max + slack

    def to_payload(self) -> dict:
        return {"p_max": fmt_float(self.p_max), "p_min": fmt_float(self.p_min)}

    @classmethod
    def from_payload(cls, payload: dict) -> "Clamp":
        return cls(p_min=float(payload["p_min"]), p_max=float(payload["p_max"]))


def clamp_pmf(probs: Sequence[float], clamp: Clamp) -> tuple[float, ...]:
    """Force a probability vector into the clamp bounds, conserving total mass.

    Iterative water-filling: entries below p_min are raised to p_min (above
    p_max lowered to p_max) and pinned; the remaining mass is spread over the
    unpinned entries in proportion to their current values, repeating until
    everything is in bounds. A vector already in bounds is returned unchanged,
    so re-clamping is the identity.
    """
    n = len(probs)
    if n < 2:
        raise InfeasibleClamp("need at least two outcomes")
    if clamp.p_min * n >= 1.0:
        raise InfeasibleClamp(f"p_min {clamp.p_min} infeasible for arity {n}")
    out = [float(p) for p in probs]
    pinned: dict[int, float] = {}
    for _ in range(n + 1):
        changed = False
        for i, p in enumerate(out):
            if i in pinned:
                continue
            if p < clamp.p_min:
                pinned[i] = clamp.p_min
                changed = True
            elif p > clamp.p_max:
                pinned[i] = clamp.p_max
                changed = True
        if not pinned:
            break  # nothing to do: in bounds already, return input untouched
        free = [i for i in range(n) if i not in pinned]
        target = 1.0 - sum(pinned.values())
        free_mass = sum(out[i] for i in free)
        for i, v in pinned.items():
            out[i] = v
        if free and free_mass > 0.0:
            scale = target / free_mass
            for i in free:
                out[i] *= scale
        if not changed:
            break
    return tuple(out)


def credits_to_pmf(alloc: CreditAllocation, clamp: Clamp) -> "Pmf":
    """Convert a 100-credit allocation into a clamped probability mass function."""
    probs = clamp_pmf([c / CREDIT_TOTAL for c in alloc.credits], clamp)
    return Pmf(probs=probs, clamp=clamp)


@dataclass(frozen=True)
class Pmf:
    """A clamped probability mass function: entries in [p_min, p_max], unit mass."""

    probs: tuple[float, ...]
    clamp: Clamp

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        object.__setattr__(self, "probs", probs)
        if len(probs) < 2:
            raise DomainError("a pmf needs at least two outcomes")
        for p in probs:
            if not self.clamp.contains(p):
                raise DomainError(
                    f"probability {p!r} outside clamp [{self.clamp.p_min}, {self.clamp.p_max}]"
                )
        total = sum(probs)
        if abs(total - 1.0) > 1e-12:
            raise DomainError(f"pmf mass {total!r} differs from 1 by more than 1e-12")

    @property
    def arity(self) -> int:
        return len(self.probs)

    def to_payload(self) -> dict:
        return {
            "clamp": self.clamp.to_payload(),
            "probs": [fmt_float(p) for p in self.probs],
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "Pmf":
        return cls(
            probs=tuple(float(p) for p in payload["probs"]),
            clamp=Clamp.from_payload(payload["clamp"]),
        )


def fmt_float(x: float) -> str:
    """Canonical decimal string for a float (shortest round-trip repr)."""
    return repr(float(x))


def fmt_ts(ts: datetime) -> str:
    """RFC 3339 UTC timestamp with Z suffix."""
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def parse_ts(text: str) -> datetime:
    return datetime.fromisoformat(text.replace("Z", "+00:00"))


def canonical_json(payload) -> str:
    """Deterministic JSON encoding: sorted keys, no whitespace drift."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
