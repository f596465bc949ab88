"""Descriptive statistics over run records.

Summaries are five-number (min, Q1, median, Q3, max) plus mean over the
percentage scores of a condition's successful runs, and per-category average
sub-scores expressed as a percentage of that category's points. Quartiles use
linear interpolation with the inclusive median convention. Failed runs never
enter the numbers; they are counted in ``n_failed``.

The human reference band ships as constants: eight participants averaged 19
of 33 raw points (min 11, max 29).
"""

from __future__ import annotations

import csv
import io
import json
import statistics
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

from .errors import MalformedFile, NoData
from .harness import RunRecord
from .rubric import CATEGORIES, percentage_of, round1


@dataclass(frozen=True)
class HumanBaseline:
    average: float
    minimum: float
    maximum: float
    participants: int
    rubric_total: float

    def average_pct(self) -> float:
        return percentage_of(self.average, self.rubric_total)

    def minimum_pct(self) -> float:
        return percentage_of(self.minimum, self.rubric_total)

    def maximum_pct(self) -> float:
        return percentage_of(self.maximum, self.rubric_total)

    def to_dict(self) -> dict[str, Any]:
        return {
            "average": self.average,
            "minimum": self.minimum,
            "maximum": self.maximum,
            "participants": self.participants,
            "rubric_total": self.rubric_total,
            "average_pct": self.average_pct(),
            "minimum_pct": self.minimum_pct(),
            "maximum_pct": self.maximum_pct(),
        }


HUMAN_BASELINE = HumanBaseline(
    average=19, minimum=11, maximum=29, participants=8, rubric_total=33)

# Published mean correctness per condition from the original live GPT-4o
# sweep. Live sampling is not reproducible at desk scale, so these are
# reference points for dashboards and the live smoke test, never expected
# values for offline runs.
REFERENCE_MEANS: dict[str, float] = {
    "E1": 34.4,
    "E2": 45.5,
    "E3": 65.2,
    "E10": 75.9,
    "E11": 84.2,
}


@dataclass(frozen=True)
class ConditionSummary:
    condition: str
    n: int
    mean: float
    median: float
    q1: float
    q3: float
    min: float
    max: float
    categories: dict[str, float]
    n_failed: int = 0


def five_numbers(values: Sequence[float]) -> tuple[float, float, float, float, float]:
    """(min, q1, median, q3, max) with inclusive linear interpolation."""
    if not values:
        raise NoData("no values to summarize")
    if len(values) == 1:
        v = values[0]
        return (v, v, v, v, v)
    q1, median, q3 = statistics.quantiles(values, n=4, method="inclusive")
    return (min(values), q1, median, q3, max(values))


def condition_summary(records: Iterable[RunRecord], condition: str) -> ConditionSummary:
    graded = []
    failed = 0
    for record in records:
        if record.condition != condition:
            continue
        if record.status == "ok" and record.breakdown is not None:
            graded.append(record)
        else:
            failed += 1
    if not graded:
        raise NoData(f"no successful runs for condition {condition!r}")

    percentages = [r.breakdown.percentage for r in graded]
    lo, q1, median, q3, hi = five_numbers(percentages)

    categories: dict[str, float] = {}
    for category in CATEGORIES:
        shares = []
        for record in graded:
            points = record.breakdown.by_category_points.get(category, 0.0)
            if points > 0:
                shares.append(100.0 * record.breakdown.by_category.get(category, 0.0) / points)
        categories[category] = statistics.fmean(shares) if shares else 0.0

    return ConditionSummary(
        condition=condition,
        n=len(graded),
        mean=statistics.fmean(percentages),
        median=median,
        q1=q1,
        q3=q3,
        min=lo,
        max=hi,
        categories=categories,
        n_failed=failed,
    )


def summarize_all(records: Sequence[RunRecord],
                  conditions: Sequence[str] | None = None) -> list[ConditionSummary]:
    """One summary per condition; order follows ``conditions`` when given,
    else first appearance in the records."""
    if conditions is None:
        seen: list[str] = []
        for record in records:
            if record.condition not in seen:
                seen.append(record.condition)
        conditions = seen
    return [condition_summary(records, name) for name in conditions]


def subitem_breakdown(records: Iterable[RunRecord], condition: str) -> dict[str, float]:
    """Average awarded score per rubric item over a condition's graded runs."""
    graded = [r for r in records
              if r.condition == condition and r.status == "ok" and r.breakdown]
    if not graded:
        raise NoData(f"no successful runs for condition {condition!r}")
    item_ids = list(graded[0].breakdown.scores)
    return {
        item_id: statistics.fmean(r.breakdown.scores.get(item_id, 0.0) for r in graded)
        for item_id in item_ids
    }


# -- export / import ----------------------------------------------------------

CSV_COLUMNS = (
    "condition", "n", "mean", "median", "q1", "q3", "min", "max",
    *CATEGORIES, "n_failed",
)


def _summary_row(summary: ConditionSummary) -> dict[str, Any]:
    row: dict[str, Any] = {
        "condition": summary.condition,
        "n": summary.n,
        "mean": round1(summary.mean),
        "median": round1(summary.median),
        "q1": round1(summary.q1),
        "q3": round1(summary.q3),
        "min": round1(summary.min),
        "max": round1(summary.max),
    }
    for category in CATEGORIES:
        row[category] = round1(summary.categories.get(category, 0.0))
    row["n_failed"] = summary.n_failed
    return row


def export_summaries(summaries: Sequence[ConditionSummary], format: str = "csv") -> bytes:
    """Render summaries as ``csv``, ``json``, or ``boxplot-json`` (the
    five-number summaries only, ready for box-and-whisker rendering).
    Numbers are rounded to one decimal on the way out."""
    if format == "csv":
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for summary in summaries:
            writer.writerow(_summary_row(summary))
        return buffer.getvalue().encode("utf-8")
    if format == "json":
        rows = [_summary_row(s) for s in summaries]
        return (json.dumps(rows, ensure_ascii=False, indent=2) + "\n").encode("utf-8")
    if format == "boxplot-json":
        rows = [
            {
                "condition": s.condition,
                "n": s.n,
                "min": round1(s.min),
                "q1": round1(s.q1),
                "median": round1(s.median),
                "q3": round1(s.q3),
                "max": round1(s.max),
            }
            for s in summaries
        ]
        return (json.dumps(rows, ensure_ascii=False, indent=2) + "\n").encode("utf-8")
    raise ValueError(f"unknown export format {format!r}")


def parse_summaries_csv(data: bytes | str) -> list[ConditionSummary]:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    reader = csv.DictReader(io.StringIO(data))
    if reader.fieldnames is None or tuple(reader.fieldnames) != CSV_COLUMNS:
        raise MalformedFile(
            f"summary CSV must have columns {CSV_COLUMNS}, got {reader.fieldnames}")
    out = []
    try:
        for row in reader:
            out.append(ConditionSummary(
                condition=row["condition"],
                n=int(row["n"]),
                mean=float(row["mean"]),
                median=float(row["median"]),
                q1=float(row["q1"]),
                q3=float(row["q3"]),
                min=float(row["min"]),
                max=float(row["max"]),
                categories={c: float(row[c]) for c in CATEGORIES},
                n_failed=int(row["n_failed"]),
            ))
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedFile(f"summary CSV row does not parse: {exc}") from exc
    return out
