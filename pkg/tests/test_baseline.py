"""Superensemble baseline construction and member-file ingestion."""

from __future__ import annotations

import math
from datetime import datetime, timezone
from decimal import Decimal

import numpy as np
import pytest

from wxbits.baseline import (
    BaselineSpec,
    SuperensembleSample,
    build_baseline,
    build_baselines,
    build_game1_thresholds,
    build_game2_bins,
    ingest_members,
    percentile,
)
from wxbits.core import VariableKind, VariableSpec, canonical_json
from wxbits.errors import (
    DegenerateEnsemble,
    EmptyInput,
    InsufficientMembers,
    ParseError,
    SchemaError,
)

RUN = datetime(2023, 10, 1, 12, tzinfo=timezone.utc)


def samples(kind: str, values) -> list[SuperensembleSample]:
    spec = VariableSpec.for_kind(kind)
    return [
        SuperensembleSample(
            member_id=f"m:{i}", variable=spec, value=Decimal(str(v)), run_time=RUN
        )
        for i, v in enumerate(values)
    ]


class TestPercentile:
    def test_exact_median(self):
        assert percentile([1, 2, 3], 0.5) == 2

    def test_interpolates_between_order_statistics(self):
        assert percentile([10, 20], 0.9) == pytest.approx(19.0, abs=0)

    def test_constant_sample(self):
        for q in (0.0, 0.3, 0.9, 1.0):
            assert percentile([5, 5, 5, 5], q) == 5

    def test_order_insensitive(self):
        assert percentile([3, 1, 2], 0.5) == percentile([1, 2, 3], 0.5)

    def test_empty_rejected(self):
        with pytest.raises(EmptyInput):
            percentile([], 0.5)

    def test_agrees_with_numpy_on_random_samples(self):
        rng = np.random.default_rng(42)
        for _ in range(1000):
            n = int(rng.integers(1, 60))
            vals = rng.normal(50, 20, size=n)
            q = float(rng.uniform(0, 1))
            assert percentile(list(vals), q) == pytest.approx(
                float(np.percentile(vals, q * 100)), abs=1e-9
            )


class TestGame1Thresholds:
    def test_ten_member_median(self):
        # 1..10 degF: median 5.5 rounds up to 6; 4 of 10 members exceed it
        thresholds = build_game1_thresholds(samples("temp_max", range(1, 11)))
        t50 = thresholds[0]
        assert t50.q == Decimal("0.5")
        assert t50.value == Decimal("6")
        assert t50.b_over == pytest.approx(0.4, abs=0)

    def test_uniform_wind_ninetieth(self):
        thresholds = build_game1_thresholds(samples("wind_max", range(30)))
        t90 = thresholds[1]
        assert t90.q == Decimal("0.9")
        assert t90.value == Decimal("26")
        assert t90.b_over == pytest.approx(3 / 30, abs=0)

    def test_degenerate_ensemble_clamps_up(self):
        thresholds = build_game1_thresholds(samples("temp_max", [55] * 12))
        for t in thresholds:
            assert t.value == Decimal("55")
            assert t.b_over == pytest.approx(1 / 48, abs=0)  # p_min for N=12

    def test_single_member_rejected(self):
        with pytest.raises(InsufficientMembers):
            build_game1_thresholds(samples("temp_max", [55]))

    def test_round_trip_counts_reproduce_published_odds(self):
        # published b_over equals the exceedance fraction of the rounded
        # threshold, pre-clamp, for random ensembles
        rng = np.random.default_rng(7)
        for _ in range(200):
            values = np.round(rng.normal(60, rng.uniform(1, 8), size=30), 4)
            group = samples("temp_max", [f"{v:.4f}" for v in values])
            for t in build_game1_thresholds(group):
                count = sum(1 for s in group if s.value > t.value)
                raw = count / 30
                binary_lo, binary_hi = 1 / 120, 1 - 1 / 120
                assert t.b_over == min(max(raw, binary_lo), binary_hi)


class TestGame2Bins:
    def test_uniform_thirty_members_give_near_decile_masses(self):
        bins, clamp = build_game2_bins(samples("wind_max", range(30)))
        assert len(bins) == 10
        assert math.fsum(b.mass for b in bins) == pytest.approx(1.0, abs=1e-12)
        for b in bins:
            assert clamp.p_min - 1e-12 <= b.mass <= clamp.p_max + 1e-12
            assert b.mass == pytest.approx(0.1, abs=0.04)

    def test_edges_strictly_increase_after_tie_repair(self):
        values = [0.05] * 6 + [0.10] * 12 + [0.20] * 6 + [0.30] * 6
        bins, _ = build_game2_bins(samples("precip_accum", values))
        edges = [b.high for b in bins[:-1]]
        assert edges[2] == Decimal("0.10")
        assert edges[3] == Decimal("0.11")  # duplicate nudged one step up
        assert edges[4] == Decimal("0.12")
        for lo, hi in zip(edges, edges[1:]):
            assert lo < hi

    def test_no_spread_rejected(self):
        with pytest.raises(DegenerateEnsemble):
            build_game2_bins(samples("precip_accum", ["0.00"] * 20))

    def test_too_few_members_rejected(self):
        with pytest.raises(DegenerateEnsemble):
            build_game2_bins(samples("temp_max", range(9)))

    def test_bin_edges_partition_support(self):
        bins, _ = build_game2_bins(samples("precip_accum", [i / 100 for i in range(30)]))
        assert bins[0].low == Decimal("0.00")  # support floor for precipitation
        assert bins[-1].high is None  # open-ended top bin
        temps, _ = build_game2_bins(samples("temp_max", range(40, 70)))
        assert temps[0].low is None  # temperature support is unbounded below

    def test_member_counts_partition_the_ensemble(self):
        rng = np.random.default_rng(13)
        for kind, gen in [
            ("temp_max", lambda: rng.normal(60, 5, 30)),
            ("wind_max", lambda: np.abs(rng.normal(15, 6, 30))),
            ("precip_accum", lambda: np.abs(rng.exponential(0.2, 30))),
        ]:
            values = np.round(gen(), 4)
            group = samples(kind, [f"{v:.4f}" for v in values])
            spec = build_baseline(group, published_at=RUN)
            counts = [0] * 10
            for s in group:
                counts[spec.bin_index(s.value)] += 1
            assert sum(counts) == 30


class TestBaselineSpec:
    def test_serialization_is_stable(self):
        group = samples("temp_max", range(40, 70))
        a = build_baseline(group, published_at=RUN)
        b = build_baseline(list(reversed(group)), published_at=RUN)
        assert canonical_json(a.to_payload()) == canonical_json(b.to_payload())

    def test_payload_round_trip(self):
        spec = build_baseline(samples("precip_accum", [i / 50 for i in range(30)]), RUN)
        again = BaselineSpec.from_payload(spec.to_payload())
        assert canonical_json(again.to_payload()) == canonical_json(spec.to_payload())

    def test_bin_pmf_is_valid(self):
        spec = build_baseline(samples("wind_max", range(0, 60, 2)), RUN)
        pmf = spec.bin_pmf()
        assert abs(math.fsum(pmf.probs) - 1.0) <= 1e-12

    def test_trace_maps_to_bin_zero(self):
        spec = build_baseline(samples("precip_accum", [i / 50 for i in range(30)]), RUN)
        assert spec.bin_index(Decimal("0.00"), trace=True) == 0

    def test_values_beyond_top_edge_land_in_last_bin(self):
        spec = build_baseline(samples("temp_max", range(40, 70)), RUN)
        assert spec.bin_index(Decimal("150")) == 9
        assert spec.bin_index(Decimal("-60")) == 0


CSV_HEADER = "run_time,model,member,variable,value,trace\n"


def write_members(tmp_path, rows, header=CSV_HEADER):
    path = tmp_path / "members.csv"
    path.write_text(header + "".join(rows), encoding="utf-8")
    return path


def member_rows(n=30):
    rows = []
    for kind, base in [
        ("temp_max", 60),
        ("temp_min", 40),
        ("wind_max", 10),
        ("precip_accum", 0.0),
    ]:
        for i in range(n):
            value = base + i * (0.01 if kind == "precip_accum" else 0.5)
            rows.append(f"2023-10-01T12:00:00Z,gefs,{i:02d},{kind},{value},false\n")
    return rows


class TestIngestMembers:
    def test_well_formed_file(self, tmp_path):
        path = write_members(tmp_path, member_rows(30))
        parsed = ingest_members(path)
        assert len(parsed) == 120
        per_kind = {}
        for s in parsed:
            per_kind[s.variable.kind] = per_kind.get(s.variable.kind, 0) + 1
        assert per_kind == {k: 30 for k in VariableKind}

    def test_negative_precip_rejected_with_line(self, tmp_path):
        rows = member_rows(12)
        rows.insert(3, "2023-10-01T12:00:00Z,nam,00,precip_accum,-0.05,false\n")
        path = write_members(tmp_path, rows)
        with pytest.raises(ParseError) as exc:
            ingest_members(path)
        assert exc.value.line == 5  # header is line 1

    def test_unknown_variable_rejected(self, tmp_path):
        path = write_members(
            tmp_path, ["2023-10-01T12:00:00Z,gfs,00,dewpoint,55,false\n"]
        )
        with pytest.raises(ParseError):
            ingest_members(path)

    def test_non_finite_value_rejected(self, tmp_path):
        path = write_members(
            tmp_path, ["2023-10-01T12:00:00Z,gfs,00,temp_max,NaN,false\n"]
        )
        with pytest.raises(ParseError):
            ingest_members(path)

    def test_empty_file_is_schema_error(self, tmp_path):
        path = tmp_path / "members.csv"
        path.write_text("", encoding="utf-8")
        with pytest.raises(SchemaError):
            ingest_members(path)

    def test_header_only_is_schema_error(self, tmp_path):
        path = write_members(tmp_path, [])
        with pytest.raises(SchemaError):
            ingest_members(path)

    def test_wrong_header_is_schema_error(self, tmp_path):
        path = write_members(tmp_path, member_rows(12), header="a,b,c\n")
        with pytest.raises(SchemaError):
            ingest_members(path)

    def test_builds_baselines_for_all_variables(self, tmp_path):
        path = write_members(tmp_path, member_rows(30))
        specs = build_baselines(ingest_members(path), published_at=RUN)
        assert set(specs) == set(VariableKind)
        for spec in specs.values():
            assert spec.n_members == 30
            assert len(spec.thresholds) == 2
            assert len(spec.bins) == 10
