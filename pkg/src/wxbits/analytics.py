"""Aggregate diagnostics over a player's scored history.

The mean ignorance of a binary forecast stream decomposes exactly into
reliability (information lost to miscalibration), discrimination
(information gained by separating occurrences from non-occurrences), and
uncertainty (entropy of the outcome climatology):

    mean ignorance = REL - DSC + UNC

Records are grouped by the exact issued probability; the credit lattice is
finite, so no binning hyper-parameter is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import fmt_float
from .errors import DomainError, EmptyInput


def _entropy(p: float) -> float:
    """Binary entropy in bits, with 0*log0 = 0."""
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def binary_kl(a: float, b: float) -> float:
    """KL divergence d(a||b) between Bernoulli rates, in bits, 0*log0 = 0."""
    if not 0.0 < b < 1.0:
        raise DomainError(f"reference rate {b} must lie strictly inside (0, 1)")
    total = 0.0
    if a > 0.0:
        total += a * math.log2(a / b)
    if a < 1.0:
        total += (1.0 - a) * math.log2((1.0 - a) / (1.0 - b))
    return total


@dataclass(frozen=True)
class Decomposition:
    rel_bits: float
    dsc_bits: float
    unc_bits: float
    mean_ign_bits: float
    n_events: int

    def __post_init__(self):
        if self.rel_bits < 0 or self.dsc_bits < 0 or self.unc_bits < 0:
            raise DomainError("decomposition components are non-negative")
        residual = self.mean_ign_bits - (self.rel_bits - self.dsc_bits + self.unc_bits)
        if abs(residual) > 1e-9:
            raise DomainError(f"decomposition identity violated by {residual}")

    def to_payload(self) -> dict:
        return {
            "dsc_bits": fmt_float(self.dsc_bits),
            "mean_ign_bits": fmt_float(self.mean_ign_bits),
            "n_events": self.n_events,
            "rel_bits": fmt_float(self.rel_bits),
            "unc_bits": fmt_float(self.unc_bits),
        }


@dataclass(frozen=True)
class ReliabilityPoint:
    """One reliability-curve point: issued probability, observed frequency, count."""

    f: float
    obs_freq: float
    n: int

    def to_payload(self) -> dict:
        return {"f": fmt_float(self.f), "n": self.n, "obs_freq": fmt_float(self.obs_freq)}


def _grouped(records: Sequence[tuple[float, int]]) -> dict[float, list[int]]:
    groups: dict[float, list[int]] = {}
    for f, o in records:
        if not 0.0 < f < 1.0:
            raise DomainError(f"issued probability {f} must be clamped inside (0, 1)")
        if o not in (0, 1):
            raise DomainError(f"outcome must be 0 or 1, got {o!r}")
        groups.setdefault(float(f), []).append(int(o))
    return groups


def decompose(records: Iterable[tuple[float, int]]) -> Decomposition:
    """Reliability/discrimination/uncertainty split of a binary forecast stream."""
    records = list(records)
    if not records:
        raise EmptyInput("nothing to decompose")
    groups = _grouped(records)
    total = len(records)
    base_rate = sum(o for _, o in records) / total

    rel = 0.0
    dsc = 0.0
    for f, outcomes in groups.items():
        freq = sum(outcomes) / len(outcomes)
        rel += len(outcomes) * binary_kl(freq, f)
        if 0.0 < base_rate < 1.0:
            dsc += len(outcomes) * binary_kl(freq, base_rate)
    rel /= total
    dsc /= total
    unc = _entropy(base_rate)
    mean_ign = -math.fsum(
        math.log2(f if o == 1 else 1.0 - f) for f, o in records
    ) / total
    return Decomposition(
        rel_bits=rel, dsc_bits=dsc, unc_bits=unc, mean_ign_bits=mean_ign, n_events=total
    )


def reliability_curve(records: Iterable[tuple[float, int]]) -> list[ReliabilityPoint]:
    """Grouped (issued probability, observed frequency, count) points, sorted by f."""
    records = list(records)
    if not records:
        raise EmptyInput("no records for a reliability curve")
    groups = _grouped(records)
    return [
        ReliabilityPoint(f=f, obs_freq=sum(os) / len(os), n=len(os))
        for f, os in sorted(groups.items())
    ]
