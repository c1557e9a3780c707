"""Scoring kernel: Brier, ignorance, information gain, ranked information
gain, and the legacy deterministic error points.

All probabilistic scores are in bits (base-2 logarithms) and are additive
across events and variables. Inputs are expected to be clamped away from 0
and 1 so no score can diverge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal

from .core import (
    Clamp,
    CreditAllocation,
    Observation,
    Pmf,
    VariableKind,
    VariableSpec,
    credits_to_pmf,
    fmt_float,
    quantize_to_resolution,
)
from .errors import ArityMismatch, DomainError, UnitMismatch


def brier(f: float, o: int) -> float:
    """Squared error of a probability forecast against a binary outcome."""
    if not 0.0 <= f <= 1.0:
        raise DomainError(f"forecast probability {f} outside [0, 1]")
    if o not in (0, 1):
        raise DomainError(f"binary outcome must be 0 or 1, got {o!r}")
    return (f - o) ** 2


def ignorance(f: float) -> float:
    """Surprise, in bits, of the probability assigned to the verified outcome."""
    if f <= 0.0:
        raise DomainError(f"ignorance diverges at probability {f}; clamp upstream")
    if f > 1.0:
        raise DomainError(f"probability {f} exceeds 1")
    return -math.log2(f)


def info_gain(f: float, b: float, clamp: Clamp | None = None) -> float:
    """Bits gained by forecast probability f over baseline probability b
    for the verified outcome. Positive iff f > b."""
    for name, p in (("forecast", f), ("baseline", b)):
        if clamp is not None:
            if not clamp.contains(p):
                raise DomainError(
                    f"{name} probability {p} outside clamp [{clamp.p_min}, {clamp.p_max}]"
                )
        elif not 0.0 < p <= 1.0:
            raise DomainError(f"{name} probability {p} outside (0, 1]")
    return math.log2(f / b)


def contingency_cell(f: float, b: float, observed: bool, clamp: Clamp | None = None) -> float:
    """One cell of the probabilistic 2x2 contingency table.

    Sign follows the ranked-score convention: the magnitude log2(f/b) counts
    positively when the event was observed and negatively when it was not,
    so overweighting a non-event loses bits and underweighting it gains them.
    """
    base = info_gain(f, b, clamp)
    return base if observed else -base


@dataclass(frozen=True)
class BinaryEventScore:
    """Settled over/under event: information gained on the verified side.

    A ``pushed`` event (observation exactly on the threshold) is voided:
    zero bits, excluded from means, and f/b are not defined.
    """

    f: float | None
    b: float | None
    ig_bits: float
    pushed: bool
    verified_over: bool | None

    def __post_init__(self):
        if self.pushed and self.ig_bits != 0.0:
            raise DomainError("pushed events must carry zero bits")

    def to_payload(self) -> dict:
        return {
            "b": None if self.b is None else fmt_float(self.b),
            "bits": fmt_float(self.ig_bits),
            "f": None if self.f is None else fmt_float(self.f),
            "pushed": self.pushed,
            "verified_over": self.verified_over,
        }


def score_over_under(
    alloc: CreditAllocation,
    threshold: Decimal,
    b_over: float,
    obs: Observation,
    clamp: Clamp,
) -> BinaryEventScore:
    """Settle a spread bet on whether the observation exceeds the threshold.

    ``alloc`` index 0 is the over side, index 1 the under side. The baseline
    probability of the over side is ``b_over``. An observation equal to the
    threshold (both quantized) is a push.
    """
    if alloc.arity != 2:
        raise ArityMismatch(f"over/under allocations have arity 2, got {alloc.arity}")
    binary = clamp.binary()
    if not binary.contains(b_over):
        raise DomainError(f"baseline {b_over} outside clamp [{binary.p_min}, {binary.p_max}]")
    pmf = credits_to_pmf(alloc, binary)
    observed = quantize_to_resolution(obs.value, obs.variable)
    threshold = quantize_to_resolution(threshold, obs.variable)
    if observed == threshold:
        return BinaryEventScore(f=None, b=None, ig_bits=0.0, pushed=True, verified_over=None)
    over = observed > threshold
    f = pmf.probs[0] if over else pmf.probs[1]
    b = b_over if over else 1.0 - b_over
    return BinaryEventScore(
        f=f, b=b, ig_bits=info_gain(f, b, binary), pushed=False, verified_over=over
    )


@dataclass(frozen=True)
class RankedScore:
    """Per-bin signed information gain over an ordered bin partition."""

    per_bin_bits: tuple[float, ...]
    total_bits: float
    observed_bin: int

    def __post_init__(self):
        if abs(self.total_bits - math.fsum(self.per_bin_bits)) > 1e-12:
            raise DomainError("total bits must equal the per-bin sum")

    def to_payload(self) -> dict:
        return {
            "bits": fmt_float(self.total_bits),
            "observed_bin": self.observed_bin,
            "per_bin_bits": [fmt_float(x) for x in self.per_bin_bits],
        }


def ranked_info_gain(pmf: Pmf, baseline: Pmf, observed_bin: int) -> RankedScore:
    """Signed sum of per-bin information gain: positive sign on the observed
    bin, negative on every other bin.

    The maximum for a given baseline is achieved by placing all 100 credits
    in the verifying bin.
    """
    if pmf.arity != baseline.arity:
        raise ArityMismatch(f"forecast arity {pmf.arity} != baseline arity {baseline.arity}")
    if not 0 <= observed_bin < pmf.arity:
        raise DomainError(f"observed bin {observed_bin} outside 0..{pmf.arity - 1}")
    per_bin = tuple(
        (1.0 if k == observed_bin else -1.0) * math.log2(f_k / b_k)
        for k, (f_k, b_k) in enumerate(zip(pmf.probs, baseline.probs))
    )
    return RankedScore(
        per_bin_bits=per_bin, total_bits=math.fsum(per_bin), observed_bin=observed_bin
    )


@dataclass(frozen=True)
class LegacyScore:
    """Deterministic error points under the original contest rules."""

    error_points: Decimal
    variable: VariableSpec

    def __post_init__(self):
        if self.error_points < 0:
            raise DomainError("error points cannot be negative")

    def to_payload(self) -> dict:
        return {"error_points": str(self.error_points), "kind": self.variable.kind.value}


# Precipitation error accrues per 0.01 in at a rate depending on where in the
# accumulation range the error falls; rates taper for larger amounts.
_PRECIP_TIERS: tuple[tuple[Decimal, Decimal | None, Decimal], ...] = (
    (Decimal("0.00"), Decimal("0.10"), Decimal("0.4")),
    (Decimal("0.10"), Decimal("0.25"), Decimal("0.3")),
    (Decimal("0.25"), Decimal("0.50"), Decimal("0.2")),
    (Decimal("0.50"), None, Decimal("0.1")),
)

_HUNDREDTH = Decimal("0.01")


def legacy_error_points(
    forecast: Decimal | int | float | str, obs: Observation, spec: VariableSpec
) -> LegacyScore:
    """Error points for a deterministic forecast.

    Temperature: 1 point per degF of error. Wind: 0.5 points per knot.
    Precipitation: error accumulates piecewise across the rate tiers between
    forecast and observation; a trace observation against a 0.00 forecast
    (or vice versa) scores zero.
    """
    if obs.variable.kind is not spec.kind:
        raise UnitMismatch(
            f"observation is {obs.variable.kind.value}, scoring asked for {spec.kind.value}"
        )
    fcst = quantize_to_resolution(forecast, spec)
    if spec.nonnegative and fcst < 0:
        raise DomainError(f"{spec.kind.value} forecast cannot be negative")
    if spec.kind in (VariableKind.TEMP_MAX, VariableKind.TEMP_MIN):
        points = abs(fcst - obs.value)
    elif spec.kind is VariableKind.WIND_MAX:
        points = abs(fcst - obs.value) * Decimal("0.5")
    else:
        points = _precip_points(fcst, obs)
    return LegacyScore(error_points=points, variable=spec)


def _precip_points(forecast: Decimal, obs: Observation) -> Decimal:
    observed = obs.value
    if obs.trace and forecast == 0:
        return Decimal("0")
    lo, hi = sorted((forecast, observed))
    points = Decimal("0")
    for tier_lo, tier_hi, rate in _PRECIP_TIERS:
        upper = hi if tier_hi is None else min(hi, tier_hi)
        overlap = upper - max(lo, tier_lo)
        if overlap > 0:
            points += (overlap / _HUNDREDTH) * rate
    return points
