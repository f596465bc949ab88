"""Rubric engine: load scoring rubrics, drive the two-stage judge, parse grades.

Grading is two chat calls at temperature 0. Stage one hands the judge the
report and one question per rubric item; stage two hands it the answers plus
the rubric's scoring options and asks for a JSON object mapping "Q1", "Q2",
... to the awarded score. Stage two gets exactly one retry when its output
contains no parseable JSON, then the failure surfaces as MalformedGrading.

Percentages round half-up to one decimal place via Decimal, never float
round(): a report graded 29.5 of 33 reads 89.4, not 89.39999.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from decimal import Decimal, ROUND_HALF_UP
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

from .compiler import Message, PromptBundle
from .errors import (
    MalformedGrading,
    MalformedRubric,
    MissingItem,
    OffRubricValue,
    TotalMismatch,
)
from .gateway import CompletionRequest, Gateway

CATEGORIES = ("Who", "What", "When", "Where", "Other")

QUESTION_SYSTEM = "Please read the report first, then answer the following questions."
QUESTION_HEADER = "Here are the questions I want you to answer:"
GRADING_SYSTEM = (
    "Please grade based on the given answers according to the following rubrics "
    "and return in JSON: a single object mapping each question label "
    '("Q1", "Q2", ...) to the awarded score.'
)
GRADING_HEADER = "Please grade the report according to the following rubrics:"

JUDGE_TEMPERATURE = 0.0


def round1(value: float) -> float:
    """Round half-up to one decimal place."""
    return float(Decimal(str(value)).quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


def percentage_of(points: float, total: float) -> float:
    if total <= 0:
        return 0.0
    return round1(100.0 * points / total)


def _fmt(value: float) -> str:
    return str(int(value)) if float(value) == int(value) else str(float(value))


@dataclass(frozen=True)
class RubricItem:
    id: str
    category: str
    description: str
    points: float
    allowed_scores: tuple[float, ...]
    question: str


@dataclass(frozen=True)
class Rubric:
    total: float
    items: tuple[RubricItem, ...]

    def category_points(self) -> dict[str, float]:
        out = {c: 0.0 for c in CATEGORIES}
        for item in self.items:
            out[item.category] += item.points
        return out


def _check_item(raw: Any, seen_ids: set[str]) -> RubricItem:
    if not isinstance(raw, dict):
        raise MalformedRubric(f"rubric item must be an object, got {raw!r}")
    try:
        item = RubricItem(
            id=raw["id"],
            category=raw["category"],
            description=raw["description"],
            points=float(raw["points"]),
            allowed_scores=tuple(float(v) for v in raw["allowed_scores"]),
            question=raw["question"],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedRubric(f"rubric item does not match the schema: {exc}") from exc
    if not item.id or item.id in seen_ids:
        raise MalformedRubric(f"missing or duplicate item id {item.id!r}")
    if item.category not in CATEGORIES:
        raise MalformedRubric(
            f"{item.id}: category {item.category!r} not in {CATEGORIES}")
    if item.points <= 0:
        raise MalformedRubric(f"{item.id}: points must be positive")
    if 0.0 not in item.allowed_scores:
        raise MalformedRubric(f"{item.id}: allowed_scores must contain 0")
    if item.points not in item.allowed_scores:
        raise MalformedRubric(
            f"{item.id}: allowed_scores must contain the full {_fmt(item.points)} points")
    if any(v < 0 or v > item.points for v in item.allowed_scores):
        raise MalformedRubric(f"{item.id}: allowed score outside [0, points]")
    if len(set(item.allowed_scores)) != len(item.allowed_scores):
        raise MalformedRubric(f"{item.id}: duplicate allowed scores")
    if not item.question:
        raise MalformedRubric(f"{item.id}: question is empty")
    seen_ids.add(item.id)
    return item


def rubric_from_dict(raw: Any) -> Rubric:
    if not isinstance(raw, dict):
        raise MalformedRubric("rubric file must hold a JSON object")
    try:
        declared = float(raw["total"])
        raw_items = raw["items"]
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedRubric(f"rubric file does not match the schema: {exc}") from exc
    if not isinstance(raw_items, list):
        raise MalformedRubric("rubric items must be a list")
    seen: set[str] = set()
    items = tuple(_check_item(entry, seen) for entry in raw_items)
    actual = sum(item.points for item in items)
    if abs(actual - declared) > 1e-9:
        raise TotalMismatch(
            f"declared total {_fmt(declared)} but items sum to {_fmt(actual)}")
    return Rubric(total=declared, items=items)


def load_rubric(path: str | Path) -> Rubric:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MalformedRubric(f"rubric file is not valid JSON: {exc}") from exc
    return rubric_from_dict(raw)


def load_default_rubric() -> Rubric:
    data = resources.files("spacesteer.data").joinpath("rubric_default.json").read_text("utf-8")
    return rubric_from_dict(json.loads(data))


# -- grade breakdowns ---------------------------------------------------------


@dataclass(frozen=True)
class GradeBreakdown:
    """Per-item awards plus the derived totals. ``by_category_points`` keeps
    the rubric's category maxima so records stay self-describing."""

    scores: dict[str, float]
    total: float
    percentage: float
    by_category: dict[str, float]
    by_category_points: dict[str, float]
    rubric_total: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "scores": dict(self.scores),
            "total": self.total,
            "percentage": self.percentage,
            "by_category": dict(self.by_category),
            "by_category_points": dict(self.by_category_points),
            "rubric_total": self.rubric_total,
        }


def breakdown_from_dict(raw: Any) -> GradeBreakdown:
    try:
        return GradeBreakdown(
            scores={k: float(v) for k, v in raw["scores"].items()},
            total=float(raw["total"]),
            percentage=float(raw["percentage"]),
            by_category={k: float(v) for k, v in raw["by_category"].items()},
            by_category_points={k: float(v) for k, v in raw["by_category_points"].items()},
            rubric_total=float(raw["rubric_total"]),
        )
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise MalformedGrading(f"breakdown does not match the schema: {exc}") from exc


def breakdown_from_scores(rubric: Rubric, scores: Mapping[str, float]) -> GradeBreakdown:
    """Validate per-item awards against the rubric and derive the totals."""
    awarded: dict[str, float] = {}
    by_category = {c: 0.0 for c in CATEGORIES}
    for item in rubric.items:
        if item.id not in scores:
            raise MissingItem(f"no score for item {item.id!r}")
        value = float(scores[item.id])
        if value not in item.allowed_scores:
            allowed = ", ".join(_fmt(v) for v in item.allowed_scores)
            raise OffRubricValue(
                f"{item.id}: {_fmt(value)} not in allowed scores {{{allowed}}}")
        awarded[item.id] = value
        by_category[item.category] += value
    total = sum(awarded.values())
    return GradeBreakdown(
        scores=awarded,
        total=total,
        percentage=percentage_of(total, rubric.total),
        by_category=by_category,
        by_category_points=rubric.category_points(),
        rubric_total=rubric.total,
    )


# -- judge prompts ------------------------------------------------------------


def build_question_prompt(report: str, rubric: Rubric) -> PromptBundle:
    if not report:
        raise MalformedGrading("report text is empty")
    lines = [QUESTION_HEADER, ""]
    for k, item in enumerate(rubric.items, start=1):
        lines.append(f"Q{k}. {item.question}")
        lines.append("")
    assistant = "\n".join(lines).rstrip("\n")
    return PromptBundle(
        messages=(
            Message("system", QUESTION_SYSTEM),
            Message("assistant", assistant),
            Message("user", report),
        ),
        manifest={"stage": "questions", "items": len(rubric.items)},
    )


def _option_label(item: RubricItem, value: float) -> str:
    if value == 0:
        return f"Failure to {item.description}"
    if value == item.points:
        return f"Correctly {item.description}"
    return f"Partially {item.description} ({_fmt(value)} of {_fmt(item.points)})"


def build_grading_prompt(answers: str, rubric: Rubric) -> PromptBundle:
    if not answers:
        raise MalformedGrading("answers text is empty")
    lines = [GRADING_HEADER, ""]
    for k, item in enumerate(rubric.items, start=1):
        lines.append(f"Q{k}. {item.description}.")
        for value in item.allowed_scores:
            lines.append(f"* {_option_label(item, value)} - {_fmt(value)}")
        lines.append("")
    assistant = "\n".join(lines).rstrip("\n")
    return PromptBundle(
        messages=(
            Message("system", GRADING_SYSTEM),
            Message("assistant", assistant),
            Message("user", answers),
        ),
        manifest={"stage": "grading", "items": len(rubric.items)},
    )


# -- grade parsing ------------------------------------------------------------

_FENCE = re.compile(r"```(?:json)?\s*(.*?)```", re.DOTALL)


def _extract_json_object(text: str) -> dict[str, Any]:
    candidates = [text]
    candidates.extend(m.group(1) for m in _FENCE.finditer(text))
    start, end = text.find("{"), text.rfind("}")
    if 0 <= start < end:
        candidates.append(text[start:end + 1])
    for candidate in candidates:
        try:
            value = json.loads(candidate)
        except json.JSONDecodeError:
            continue
        if isinstance(value, dict):
            return value
    raise MalformedGrading("no JSON object found in grading response")


def parse_grade_response(text: str, rubric: Rubric) -> GradeBreakdown:
    """Pull the judge's JSON out of ``text`` (tolerating prose and code
    fences around it) and validate it against the rubric. Keys may be the
    positional "Qk" labels or item ids; unknown keys are ignored."""
    raw = _extract_json_object(text)
    by_label = {f"Q{k}": item for k, item in enumerate(rubric.items, start=1)}
    by_id = {item.id: item for item in rubric.items}
    scores: dict[str, float] = {}
    for key, value in raw.items():
        item = by_label.get(str(key).strip()) or by_id.get(str(key).strip())
        if item is None:
            continue
        if isinstance(value, str):
            try:
                value = float(value)
            except ValueError:
                raise MalformedGrading(
                    f"{key}: value {value!r} is not a number") from None
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise MalformedGrading(f"{key}: value {value!r} is not a number")
        scores[item.id] = float(value)
    return breakdown_from_scores(rubric, scores)


# -- the two-stage pipeline ---------------------------------------------------


@dataclass(frozen=True)
class GradeResult:
    breakdown: GradeBreakdown
    answers_text: str
    grading_text: str
    stage2_attempts: int


def grade_report(report: str, rubric: Rubric, gateway: Gateway,
                 model: str | None = None) -> GradeResult:
    """Run the two-stage judge at temperature 0 and return the validated
    breakdown together with both raw responses for audit."""
    from .gateway import default_model

    model = model or default_model()
    question_bundle = build_question_prompt(report, rubric)
    answers = gateway.complete(CompletionRequest(
        messages=question_bundle.messages,
        temperature=JUDGE_TEMPERATURE,
        model=model,
    )).text

    grading_bundle = build_grading_prompt(answers, rubric)
    request = CompletionRequest(
        messages=grading_bundle.messages,
        temperature=JUDGE_TEMPERATURE,
        model=model,
    )
    stage2_attempts = 0
    last: MalformedGrading | None = None
    for _ in range(2):  # one retry on malformed JSON, then give up
        stage2_attempts += 1
        grading_text = gateway.complete(request).text
        try:
            breakdown = parse_grade_response(grading_text, rubric)
        except MalformedGrading as exc:
            last = exc
            continue
        return GradeResult(
            breakdown=breakdown,
            answers_text=answers,
            grading_text=grading_text,
            stage2_attempts=stage2_attempts,
        )
    assert last is not None
    raise last
