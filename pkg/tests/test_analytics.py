from __future__ import annotations

import json
import random
import statistics
import uuid

import pytest

from spacesteer.analytics import (
    CSV_COLUMNS,
    HUMAN_BASELINE,
    REFERENCE_MEANS,
    ConditionSummary,
    HumanBaseline,
    condition_summary,
    export_summaries,
    five_numbers,
    parse_summaries_csv,
    subitem_breakdown,
    summarize_all,
)
from spacesteer.errors import MalformedFile, NoData
from spacesteer.harness import RunRecord
from spacesteer.rubric import GradeBreakdown


def _breakdown(pct: float, who: float = 3.0, where: float = 2.0) -> GradeBreakdown:
    return GradeBreakdown(
        scores={"a1": who, "b1": where},
        total=who + where,
        percentage=pct,
        by_category={"Who": who, "What": 0.0, "When": 0.0,
                     "Where": where, "Other": 0.0},
        by_category_points={"Who": 3.0, "What": 0.0, "When": 0.0,
                            "Where": 2.0, "Other": 0.0},
        rubric_total=5.0,
    )


def _record(condition: str, pct: float | None = None, *, status: str = "ok",
            who: float = 3.0, where: float = 2.0,
            breakdown: GradeBreakdown | None = None) -> RunRecord:
    ok = status == "ok"
    if ok and breakdown is None:
        breakdown = _breakdown(pct if pct is not None else 50.0, who, where)
    return RunRecord(
        id=f"{condition}-{uuid.uuid4().hex[:8]}",
        plan="synth",
        condition=condition,
        replication=1,
        temperature=0.1,
        status=status,
        prompt_digest="0" * 16,
        messages=(),
        manifest={},
        output="report text" if ok else None,
        answers_text=None,
        grading_text=None,
        breakdown=breakdown,
        error=None if ok else "ProviderError: boom",
        regrade_of=None,
        model="m",
        provider="mock",
        attempts=1 if ok else 0,
        latency_s=0.0,
        started_at="2026-01-01T00:00:00+00:00",
        finished_at="2026-01-01T00:00:01+00:00",
    )


class TestFiveNumbers:
    def test_hand_oracle(self):
        assert five_numbers([10, 20, 30, 40]) == (10, 17.5, 25, 32.5, 40)

    def test_three_values(self):
        assert five_numbers([50, 60, 70]) == (50, 55, 60, 65, 70)

    def test_single_value(self):
        assert five_numbers([42.5]) == (42.5, 42.5, 42.5, 42.5, 42.5)

    def test_constant_data(self):
        assert five_numbers([7, 7, 7, 7]) == (7, 7, 7, 7, 7)

    def test_empty_raises(self):
        with pytest.raises(NoData):
            five_numbers([])

    def test_matches_statistics_quantiles(self):
        rng = random.Random(7)
        for _ in range(50):
            values = [rng.randint(0, 1000) / 10 for _ in range(rng.randint(2, 30))]
            lo, q1, median, q3, hi = five_numbers(values)
            expected = statistics.quantiles(values, n=4, method="inclusive")
            assert (q1, median, q3) == tuple(expected)
            assert (lo, hi) == (min(values), max(values))

    def test_order_of_input_is_irrelevant(self):
        assert five_numbers([40, 10, 30, 20]) == five_numbers([10, 20, 30, 40])


class TestConditionSummary:
    def test_mixed_statuses(self):
        records = [
            _record("E3", 50), _record("E3", 60), _record("E3", 70),
            _record("E3", status="failed"), _record("E3", status="failed"),
            _record("E1", 99),  # other condition, ignored
        ]
        s = condition_summary(records, "E3")
        assert s.condition == "E3"
        assert s.n == 3
        assert s.n_failed == 2
        assert s.mean == 60
        assert (s.min, s.q1, s.median, s.q3, s.max) == (50, 55, 60, 65, 70)

    def test_no_successful_runs(self):
        with pytest.raises(NoData):
            condition_summary([_record("E3", status="failed")], "E3")

    def test_no_records_at_all(self):
        with pytest.raises(NoData):
            condition_summary([_record("E1", 50)], "E3")

    def test_ok_without_breakdown_counts_as_failed(self):
        odd = _record("E3", 50)
        odd = type(odd)(**{**odd.__dict__, "breakdown": None})
        with pytest.raises(NoData):
            condition_summary([odd], "E3")

    def test_category_averages_are_percent_of_category_points(self):
        records = [
            _record("E3", 100, who=3.0, where=2.0),
            _record("E3", 30, who=1.5, where=0.0),
        ]
        s = condition_summary(records, "E3")
        assert s.categories["Who"] == 75.0    # (100 + 50) / 2
        assert s.categories["Where"] == 50.0  # (100 + 0) / 2
        assert s.categories["What"] == 0.0    # no points anywhere

    def test_failed_runs_never_enter_the_numbers(self):
        records = [_record("E3", 80), _record("E3", status="failed")]
        s = condition_summary(records, "E3")
        assert s.mean == 80 and s.n == 1 and s.n_failed == 1


class TestSummarizeAll:
    def test_order_of_first_appearance(self):
        records = [_record("E3", 50), _record("E1", 60), _record("E3", 70)]
        assert [s.condition for s in summarize_all(records)] == ["E3", "E1"]

    def test_explicit_condition_order(self):
        records = [_record("E3", 50), _record("E1", 60)]
        out = summarize_all(records, conditions=["E1", "E3"])
        assert [s.condition for s in out] == ["E1", "E3"]

    def test_explicit_unknown_condition_raises(self):
        with pytest.raises(NoData):
            summarize_all([_record("E1", 50)], conditions=["E2"])

    def test_permutation_invariance(self):
        records = [_record("E1", p) for p in (20, 40, 60, 80)]
        records += [_record("E2", p) for p in (10, 30, 50)]
        shuffled = list(records)
        random.Random(3).shuffle(shuffled)
        a = summarize_all(records, conditions=["E1", "E2"])
        b = summarize_all(shuffled, conditions=["E1", "E2"])
        assert a == b


class TestSubitemBreakdown:
    def test_average_per_item(self):
        records = [_record("E3", 90, who=3.0, where=2.0),
                   _record("E3", 40, who=1.5, where=0.0)]
        assert subitem_breakdown(records, "E3") == {"a1": 2.25, "b1": 1.0}

    def test_requires_graded_runs(self):
        with pytest.raises(NoData):
            subitem_breakdown([_record("E3", status="failed")], "E3")


class TestHumanBaseline:
    def test_raw_constants(self):
        assert HUMAN_BASELINE == HumanBaseline(
            average=19, minimum=11, maximum=29, participants=8, rubric_total=33)

    def test_percentages(self):
        assert HUMAN_BASELINE.average_pct() == 57.6
        assert HUMAN_BASELINE.minimum_pct() == 33.3
        assert HUMAN_BASELINE.maximum_pct() == 87.9

    def test_to_dict_carries_both_forms(self):
        d = HUMAN_BASELINE.to_dict()
        assert d["average"] == 19 and d["average_pct"] == 57.6
        assert d["minimum"] == 11 and d["minimum_pct"] == 33.3
        assert d["maximum"] == 29 and d["maximum_pct"] == 87.9
        assert d["participants"] == 8


def test_reference_means_pin():
    assert REFERENCE_MEANS == {
        "E1": 34.4, "E2": 45.5, "E3": 65.2, "E10": 75.9, "E11": 84.2}


SUMMARIES = [
    ConditionSummary(
        condition="E1", n=10, mean=34.4, median=33.3, q1=28.8, q3=40.9,
        min=21.2, max=48.5,
        categories={"Who": 41.7, "What": 20.0, "When": 30.0,
                    "Where": 33.3, "Other": 48.0},
        n_failed=0),
    ConditionSummary(
        condition="E11", n=9, mean=84.2, median=87.9, q1=81.8, q3=90.9,
        min=66.7, max=93.9,
        categories={"Who": 91.7, "What": 80.0, "When": 90.0,
                    "Where": 83.3, "Other": 72.0},
        n_failed=1),
]


class TestExports:
    def test_csv_header(self):
        text = export_summaries(SUMMARIES, "csv").decode("utf-8")
        assert text.splitlines()[0] == ",".join(CSV_COLUMNS)

    def test_csv_round_trip_is_numerically_identical(self):
        data = export_summaries(SUMMARIES, "csv")
        assert parse_summaries_csv(data) == SUMMARIES

    def test_csv_round_trip_from_str(self):
        text = export_summaries(SUMMARIES, "csv").decode("utf-8")
        assert parse_summaries_csv(text) == SUMMARIES

    def test_values_rounded_to_one_decimal_on_export(self):
        rough = ConditionSummary(
            condition="E1", n=3, mean=59.9666, median=60.04, q1=55.55,
            q3=64.99, min=50.0, max=70.0,
            categories={c: 33.3333 for c in
                        ("Who", "What", "When", "Where", "Other")},
            n_failed=0)
        (parsed,) = parse_summaries_csv(export_summaries([rough], "csv"))
        assert parsed.mean == 60.0
        assert parsed.median == 60.0
        assert parsed.q1 == 55.6  # half-up
        assert parsed.q3 == 65.0
        assert parsed.categories["Who"] == 33.3

    def test_json_export(self):
        data = export_summaries(SUMMARIES, "json")
        assert data.endswith(b"\n")
        rows = json.loads(data)
        assert [r["condition"] for r in rows] == ["E1", "E11"]
        assert set(rows[0]) == set(CSV_COLUMNS)
        assert rows[1]["n_failed"] == 1

    def test_boxplot_json_export(self):
        rows = json.loads(export_summaries(SUMMARIES, "boxplot-json"))
        assert rows[0] == {"condition": "E1", "n": 10, "min": 21.2,
                           "q1": 28.8, "median": 33.3, "q3": 40.9, "max": 48.5}
        assert set(rows[1]) == {"condition", "n", "min", "q1",
                                "median", "q3", "max"}

    def test_unknown_format(self):
        with pytest.raises(ValueError, match="unknown export format"):
            export_summaries(SUMMARIES, "yaml")

    def test_empty_export_round_trips(self):
        assert parse_summaries_csv(export_summaries([], "csv")) == []

    def test_csv_with_wrong_columns(self):
        with pytest.raises(MalformedFile, match="columns"):
            parse_summaries_csv("a,b,c\n1,2,3\n")

    def test_csv_with_unparseable_cell(self):
        data = export_summaries(SUMMARIES[:1], "csv").decode("utf-8")
        broken = data.replace("34.4", "lots", 1)
        with pytest.raises(MalformedFile, match="row does not parse"):
            parse_summaries_csv(broken)

    def test_csv_with_no_header_at_all(self):
        with pytest.raises(MalformedFile):
            parse_summaries_csv("")

    def test_unicode_condition_survives_the_trip(self):
        odd = ConditionSummary(
            condition="época-1", n=1, mean=50.0, median=50.0, q1=50.0,
            q3=50.0, min=50.0, max=50.0,
            categories={c: 0.0 for c in
                        ("Who", "What", "When", "Where", "Other")},
            n_failed=0)
        (parsed,) = parse_summaries_csv(export_summaries([odd], "csv"))
        assert parsed.condition == "época-1"
        rows = json.loads(export_summaries([odd], "json"))
        assert rows[0]["condition"] == "época-1"


def test_summaries_flow_from_real_records():
    records = [_record("E3", p) for p in (50, 60, 70)]
    (summary,) = summarize_all(records)
    data = export_summaries([summary], "csv")
    (parsed,) = parse_summaries_csv(data)
    assert parsed.mean == 60.0
    assert parsed.n == 3
