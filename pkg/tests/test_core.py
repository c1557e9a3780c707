"""Domain types and credit-to-probability conversion."""

from __future__ import annotations

import math
from datetime import date
from decimal import Decimal

import pytest
from hypothesis import given, strategies as st

from wxbits.core import (
    Clamp,
    CreditAllocation,
    Observation,
    Pmf,
    VariableKind,
    VariableSpec,
    clamp_pmf,
    credits_to_pmf,
    quantize_to_resolution,
)
from wxbits.errors import DomainError, InfeasibleClamp, InvalidAllocation, UnitMismatch

N30_BINARY = Clamp.for_members(30, arity=2)
N30_TEN = Clamp.for_members(30, arity=10)


def allocations(arity: int):
    """Random valid credit splits: arity non-negative ints summing to 100."""
    return (
        st.lists(st.integers(min_value=0, max_value=100), min_size=arity - 1, max_size=arity - 1)
        .map(sorted)
        .map(lambda cuts: _from_cuts(cuts, arity))
    )


def _from_cuts(cuts: list[int], arity: int) -> tuple[int, ...]:
    bounds = [0] + list(cuts) + [100]
    return tuple(bounds[i + 1] - bounds[i] for i in range(arity))


class TestVariableSpec:
    def test_resolutions_match_reporting_precision(self):
        assert VariableSpec.for_kind("temp_max").resolution == Decimal("1")
        assert VariableSpec.for_kind("wind_max").resolution == Decimal("1")
        assert VariableSpec.for_kind("precip_accum").resolution == Decimal("0.01")

    def test_open_ended_high_flags(self):
        assert VariableSpec.for_kind("wind_max").open_ended_high
        assert VariableSpec.for_kind("precip_accum").open_ended_high
        assert not VariableSpec.for_kind("temp_max").open_ended_high

    def test_wrong_resolution_rejected(self):
        with pytest.raises(UnitMismatch):
            VariableSpec(
                kind=VariableKind.TEMP_MAX,
                unit=VariableSpec.for_kind("temp_max").unit,
                resolution=Decimal("0.5"),
                open_ended_high=False,
            )


class TestQuantize:
    @pytest.mark.parametrize(
        "value,kind,expected",
        [
            ("71.5", "temp_max", "72"),
            (0.114, "precip_accum", "0.11"),
            (17.2, "wind_max", "17"),
            ("-71.5", "temp_min", "-72"),
            (0.115, "precip_accum", "0.12"),
            (26.1, "wind_max", "26"),
        ],
    )
    def test_half_away_from_zero(self, value, kind, expected):
        spec = VariableSpec.for_kind(kind)
        assert quantize_to_resolution(value, spec) == Decimal(expected)

    def test_non_finite_rejected(self):
        with pytest.raises(DomainError):
            quantize_to_resolution(Decimal("NaN"), VariableSpec.for_kind("temp_max"))


class TestObservation:
    def test_trace_requires_precip_and_zero(self):
        spec = VariableSpec.for_kind("precip_accum")
        obs = Observation(variable=spec, value=Decimal("0.00"), valid_day=date(2023, 10, 2), trace=True)
        assert obs.trace and obs.value == 0
        with pytest.raises(UnitMismatch):
            Observation(variable=spec, value=Decimal("0.05"), valid_day=date(2023, 10, 2), trace=True)
        with pytest.raises(UnitMismatch):
            Observation(
                variable=VariableSpec.for_kind("temp_max"),
                value=Decimal("0"),
                valid_day=date(2023, 10, 2),
                trace=True,
            )

    def test_negative_precip_rejected(self):
        with pytest.raises(DomainError):
            Observation(
                variable=VariableSpec.for_kind("precip_accum"),
                value=Decimal("-0.01"),
                valid_day=date(2023, 10, 2),
            )

    def test_payload_round_trip(self):
        obs = Observation(
            variable=VariableSpec.for_kind("temp_max"),
            value=Decimal("73"),
            valid_day=date(2023, 10, 2),
        )
        assert Observation.from_payload(obs.to_payload()) == obs


class TestCreditAllocation:
    def test_must_sum_to_100(self):
        with pytest.raises(InvalidAllocation):
            CreditAllocation((50, 49))

    def test_arity_restricted(self):
        with pytest.raises(InvalidAllocation):
            CreditAllocation((34, 33, 33))

    def test_fractional_credits_rejected(self):
        with pytest.raises(InvalidAllocation):
            CreditAllocation((50.0, 50.0))  # type: ignore[arg-type]

    def test_negative_rejected(self):
        with pytest.raises(InvalidAllocation):
            CreditAllocation((101, -1))


class TestClamp:
    def test_default_lower_bound_is_quarter_member_odds(self):
        assert N30_BINARY.p_min == pytest.approx(1 / 120, abs=0)
        assert N30_BINARY.p_max == pytest.approx(1 - 1 / 120, abs=0)
        assert N30_TEN.p_max == pytest.approx(1 - 9 / 120, abs=1e-15)

    def test_factor_is_tunable(self):
        assert Clamp.for_members(30, arity=2, factor=2.0).p_min == pytest.approx(1 / 60)

    def test_infeasible_combination_rejected(self):
        with pytest.raises(InfeasibleClamp):
            Clamp.for_members(2, arity=10)  # 10/8 >= 1


class TestCreditsToPmf:
    def test_even_split_needs_no_clamping(self):
        pmf = credits_to_pmf(CreditAllocation((50, 50)), N30_BINARY)
        assert pmf.probs == (0.5, 0.5)

    def test_all_in_binary_raises_floor_and_rescales(self):
        # one entry raised to p_min, complement takes the rest: (119/120, 1/120)
        pmf = credits_to_pmf(CreditAllocation((100, 0)), N30_BINARY)
        assert pmf.probs[1] == pytest.approx(1 / 120, abs=0)
        assert pmf.probs[0] == pytest.approx(119 / 120, rel=1e-15)

    def test_all_in_ten_bins(self):
        # nine bins raised to 1/120 = 0.008333..., top bin rescaled to 0.925
        pmf = credits_to_pmf(CreditAllocation((100,) + (0,) * 9), N30_TEN)
        assert pmf.probs[0] == pytest.approx(0.925, abs=1e-12)
        for p in pmf.probs[1:]:
            assert p == pytest.approx(1 / 120, abs=0)
        assert math.fsum(pmf.probs) == pytest.approx(1.0, abs=1e-12)

    def test_cascading_second_pass(self):
        # scaling down pushes a small free entry below the floor; second
        # iteration pins it and the remainder lands exactly on p_max
        clamp = Clamp.for_members(5, arity=10)  # p_min = 0.05
        pmf = credits_to_pmf(CreditAllocation((96, 4) + (0,) * 8), clamp)
        assert pmf.probs[1] == pytest.approx(0.05, abs=0)
        assert pmf.probs[0] == pytest.approx(clamp.p_max, abs=1e-12)

    def test_infeasible_clamp_rejected(self):
        with pytest.raises(InfeasibleClamp):
            clamp_pmf([0.1] * 10, Clamp(p_min=0.125, p_max=0.9))

    @given(credits=allocations(10))
    def test_output_in_bounds_and_unit_mass(self, credits):
        pmf = credits_to_pmf(CreditAllocation(credits), N30_TEN)
        assert abs(math.fsum(pmf.probs) - 1.0) <= 1e-12
        for p in pmf.probs:
            assert N30_TEN.p_min - 1e-12 <= p <= N30_TEN.p_max + 1e-12

    @given(credits=allocations(2))
    def test_binary_output_in_bounds(self, credits):
        pmf = credits_to_pmf(CreditAllocation(credits), N30_BINARY)
        assert abs(math.fsum(pmf.probs) - 1.0) <= 1e-12
        assert all(N30_BINARY.contains(p) for p in pmf.probs)

    @given(credits=allocations(10))
    def test_reclamping_is_identity(self, credits):
        once = clamp_pmf([c / 100 for c in credits], N30_TEN)
        twice = clamp_pmf(once, N30_TEN)
        assert twice == once

    @given(credits=allocations(10), bump=st.integers(min_value=1, max_value=40), k=st.integers(0, 9))
    def test_monotone_in_own_credits(self, credits, bump, k):
        # moving credits from other bins onto bin k never lowers pmf[k]
        donors = [i for i in range(10) if i != k and credits[i] > 0]
        if not donors:
            return
        moved = list(credits)
        take = min(bump, sum(credits[i] for i in donors))
        remaining = take
        for i in donors:
            step = min(remaining, moved[i])
            moved[i] -= step
            remaining -= step
            if remaining == 0:
                break
        moved[k] += take
        before = credits_to_pmf(CreditAllocation(tuple(credits)), N30_TEN).probs[k]
        after = credits_to_pmf(CreditAllocation(tuple(moved)), N30_TEN).probs[k]
        assert after >= before - 1e-12


class TestPmfValidation:
    def test_rejects_out_of_bounds(self):
        with pytest.raises(DomainError):
            Pmf(probs=(0.999, 0.001), clamp=N30_BINARY)

    def test_rejects_bad_mass(self):
        with pytest.raises(DomainError):
            Pmf(probs=(0.6, 0.6), clamp=N30_BINARY)
