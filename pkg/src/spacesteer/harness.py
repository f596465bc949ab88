"""Experiment harness: plans, runs, and the append-only run store.

A plan pins everything a matrix needs — workspace, conditions, replication
count, temperature schedule, rubric, template, model — so re-running it with
a deterministic gateway reproduces the same prompts and grades. Each
(condition, replication) pair yields one run record; failures are persisted
as ``status: "failed"`` records instead of aborting the matrix.

The store is one JSONL file per plan (append-only, one record per line) plus
a derived index; the JSONL is the source of truth and the index is rebuilt
whenever it disagrees.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable, Sequence

from .compiler import (
    Message,
    PromptBundle,
    PromptTemplate,
    assemble_prompt,
    load_default_template,
    load_template,
)
from .conditions import Condition, condition_from_dict, get_condition
from .errors import (
    GatewayError,
    MalformedFile,
    PlanError,
    SpacesteerError,
    UnknownRun,
)
from .gateway import CompletionRequest, Gateway, default_model
from .rubric import (
    GradeBreakdown,
    Rubric,
    breakdown_from_dict,
    grade_report,
    load_default_rubric,
    load_rubric,
)
from .workspace import Workspace, deserialize


def default_temperature_schedule(replications: int) -> tuple[float, ...]:
    """Replication i gets temperature 0.1 * i (one decimal)."""
    return tuple(round(0.1 * i, 1) for i in range(1, replications + 1))


@dataclass(frozen=True)
class ExperimentPlan:
    plan_id: str
    workspace: Workspace
    conditions: tuple[Condition, ...]
    replications: int
    temperature_schedule: tuple[float, ...]
    rubric: Rubric
    template: PromptTemplate
    model: str

    def __post_init__(self) -> None:
        if not self.plan_id:
            raise PlanError("plan_id is empty")
        if not self.conditions:
            raise PlanError("plan has no conditions")
        if self.replications < 1:
            raise PlanError("replications must be at least 1")
        if len(self.temperature_schedule) != self.replications:
            raise PlanError(
                f"temperature schedule has {len(self.temperature_schedule)} entries "
                f"for {self.replications} replications")
        for t in self.temperature_schedule:
            if not (0.0 <= t <= 2.0):
                raise PlanError(f"temperature {t} outside [0, 2]")
        names = [c.name for c in self.conditions]
        if len(set(names)) != len(names):
            raise PlanError("duplicate condition names in plan")


def make_plan(plan_id: str,
              workspace: Workspace,
              conditions: Sequence[Condition],
              replications: int = 10,
              temperature_schedule: Sequence[float] | None = None,
              rubric: Rubric | None = None,
              template: PromptTemplate | None = None,
              model: str | None = None) -> ExperimentPlan:
    if temperature_schedule is None:
        temperature_schedule = default_temperature_schedule(replications)
    return ExperimentPlan(
        plan_id=plan_id,
        workspace=workspace,
        conditions=tuple(conditions),
        replications=replications,
        temperature_schedule=tuple(temperature_schedule),
        rubric=rubric if rubric is not None else load_default_rubric(),
        template=template if template is not None else load_default_template(),
        model=model if model is not None else default_model(),
    )


def load_plan(path: str | Path) -> ExperimentPlan:
    """Plan file: JSON with a workspace path, condition names (or inline
    flag objects), and optional schedule/rubric/template/model overrides.
    Relative paths resolve against the plan file's directory."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise PlanError(f"plan file is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise PlanError("plan file must hold a JSON object")
    base = path.parent

    def resolve(p: str) -> Path:
        candidate = Path(p)
        return candidate if candidate.is_absolute() else base / candidate

    try:
        workspace = deserialize(resolve(raw["workspace"]).read_bytes())
        conditions = tuple(
            get_condition(c) if isinstance(c, str) else condition_from_dict(c)
            for c in raw["conditions"]
        )
        replications = int(raw.get("replications", 10))
        schedule = raw.get("temperature_schedule")
        if schedule is not None:
            schedule = tuple(float(t) for t in schedule)
    except KeyError as exc:
        raise PlanError(f"plan file lacks required key {exc}") from exc
    except FileNotFoundError as exc:
        raise PlanError(f"plan references a missing file: {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise PlanError(f"plan file does not match the schema: {exc}") from exc
    rubric = load_rubric(resolve(raw["rubric"])) if "rubric" in raw else None
    template = load_template(resolve(raw["template"])) if "template" in raw else None
    return make_plan(
        plan_id=raw.get("plan_id", path.stem),
        workspace=workspace,
        conditions=conditions,
        replications=replications,
        temperature_schedule=schedule,
        rubric=rubric,
        template=template,
        model=raw.get("model"),
    )


# -- run records --------------------------------------------------------------


@dataclass(frozen=True)
class RunRecord:
    id: str
    plan: str
    condition: str
    replication: int
    temperature: float
    status: str  # "ok" | "failed"
    prompt_digest: str
    messages: tuple[Message, ...]
    manifest: dict[str, Any]
    output: str | None
    answers_text: str | None
    grading_text: str | None
    breakdown: GradeBreakdown | None
    error: str | None
    regrade_of: str | None
    model: str
    provider: str
    attempts: int
    latency_s: float
    started_at: str
    finished_at: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "plan": self.plan,
            "condition": self.condition,
            "replication": self.replication,
            "temperature": self.temperature,
            "status": self.status,
            "prompt_digest": self.prompt_digest,
            "messages": [{"role": m.role, "content": m.content} for m in self.messages],
            "manifest": self.manifest,
            "output": self.output,
            "answers_text": self.answers_text,
            "grading_text": self.grading_text,
            "breakdown": self.breakdown.to_dict() if self.breakdown else None,
            "error": self.error,
            "regrade_of": self.regrade_of,
            "model": self.model,
            "provider": self.provider,
            "attempts": self.attempts,
            "latency_s": self.latency_s,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
        }


def record_from_dict(raw: Any) -> RunRecord:
    try:
        return RunRecord(
            id=raw["id"],
            plan=raw["plan"],
            condition=raw["condition"],
            replication=int(raw["replication"]),
            temperature=float(raw["temperature"]),
            status=raw["status"],
            prompt_digest=raw["prompt_digest"],
            messages=tuple(Message(m["role"], m["content"]) for m in raw["messages"]),
            manifest=dict(raw["manifest"]),
            output=raw.get("output"),
            answers_text=raw.get("answers_text"),
            grading_text=raw.get("grading_text"),
            breakdown=breakdown_from_dict(raw["breakdown"]) if raw.get("breakdown") else None,
            error=raw.get("error"),
            regrade_of=raw.get("regrade_of"),
            model=raw["model"],
            provider=raw["provider"],
            attempts=int(raw["attempts"]),
            latency_s=float(raw["latency_s"]),
            started_at=raw["started_at"],
            finished_at=raw["finished_at"],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedFile(f"run record does not match the schema: {exc}") from exc


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _new_run_id(plan_id: str, condition: str, replication: int) -> str:
    return f"{plan_id}-{condition}-r{replication:02d}-{uuid.uuid4().hex[:8]}"


class RunStore:
    """Append-only JSONL store for one plan's records.

    Layout: ``<root>/<plan_id>/records.jsonl`` plus ``index.json`` holding
    one summary row per record. Appends write the JSONL line first (flush +
    fsync) and then rewrite the index atomically, so a crash can at worst
    leave the index stale — never the records.
    """

    def __init__(self, root: str | Path, plan_id: str) -> None:
        self.root = Path(root)
        self.plan_id = plan_id
        self.directory = self.root / plan_id
        self.records_path = self.directory / "records.jsonl"
        self.index_path = self.directory / "index.json"
        self._lock = threading.Lock()

    def append(self, record: RunRecord) -> None:
        with self._lock:
            self.directory.mkdir(parents=True, exist_ok=True)
            line = json.dumps(record.to_dict(), ensure_ascii=False)
            with self.records_path.open("a", encoding="utf-8") as fh:
                fh.write(line + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            self._rewrite_index()

    def load(self) -> list[RunRecord]:
        if not self.records_path.exists():
            return []
        records = []
        with self.records_path.open(encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    records.append(record_from_dict(json.loads(line)))
        return records

    def get(self, run_id: str) -> RunRecord:
        for record in self.load():
            if record.id == run_id:
                return record
        raise UnknownRun(f"no run {run_id!r} in plan {self.plan_id!r}")

    def _rewrite_index(self) -> None:
        rows = [
            {
                "id": r.id,
                "condition": r.condition,
                "replication": r.replication,
                "temperature": r.temperature,
                "status": r.status,
                "regrade_of": r.regrade_of,
            }
            for r in self.load()
        ]
        index = {"plan": self.plan_id, "records": rows}
        tmp = self.index_path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(index, ensure_ascii=False, indent=2) + "\n",
                       encoding="utf-8")
        os.replace(tmp, self.index_path)

    def index(self) -> dict[str, Any]:
        if not self.index_path.exists():
            self._rewrite_index()
        return json.loads(self.index_path.read_text(encoding="utf-8"))


# -- execution ----------------------------------------------------------------


def _failed_record(plan: ExperimentPlan, condition: Condition, replication: int,
                   temperature: float, bundle: PromptBundle | None,
                   error: Exception, provider: str, started: str) -> RunRecord:
    return RunRecord(
        id=_new_run_id(plan.plan_id, condition.name, replication),
        plan=plan.plan_id,
        condition=condition.name,
        replication=replication,
        temperature=temperature,
        status="failed",
        prompt_digest=bundle.digest() if bundle else "",
        messages=bundle.messages if bundle else (),
        manifest=bundle.manifest if bundle else {},
        output=None,
        answers_text=None,
        grading_text=None,
        breakdown=None,
        error=f"{type(error).__name__}: {error}",
        regrade_of=None,
        model=plan.model,
        provider=provider,
        attempts=0,
        latency_s=0.0,
        started_at=started,
        finished_at=_now(),
    )


def run_single(plan: ExperimentPlan, condition: Condition, replication: int,
               gateway: Gateway, store: RunStore | None = None) -> RunRecord:
    """Execute one replication: assemble, summarize, grade, persist."""
    temperature = plan.temperature_schedule[replication - 1]
    started = _now()
    bundle: PromptBundle | None = None
    try:
        bundle = assemble_prompt(plan.workspace, condition, plan.template)
        completion = gateway.complete(CompletionRequest(
            messages=bundle.messages,
            temperature=temperature,
            model=plan.model,
        ))
        grade = grade_report(completion.text, plan.rubric, gateway, model=plan.model)
        record = RunRecord(
            id=_new_run_id(plan.plan_id, condition.name, replication),
            plan=plan.plan_id,
            condition=condition.name,
            replication=replication,
            temperature=temperature,
            status="ok",
            prompt_digest=bundle.digest(),
            messages=bundle.messages,
            manifest=bundle.manifest,
            output=completion.text,
            answers_text=grade.answers_text,
            grading_text=grade.grading_text,
            breakdown=grade.breakdown,
            error=None,
            regrade_of=None,
            model=plan.model,
            provider=completion.provider,
            attempts=completion.attempts_used,
            latency_s=round(completion.latency_s, 6),
            started_at=started,
            finished_at=_now(),
        )
    except (SpacesteerError, GatewayError) as exc:
        record = _failed_record(plan, condition, replication, temperature,
                                bundle, exc, gateway.provider_name, started)
    if store is not None:
        store.append(record)
    return record


def run_matrix(plan: ExperimentPlan, gateway: Gateway,
               store: RunStore | None = None) -> list[RunRecord]:
    """Every condition x every replication, in plan order. One failed run
    never stops the rest."""
    records = []
    for condition in plan.conditions:
        for replication in range(1, plan.replications + 1):
            records.append(run_single(plan, condition, replication, gateway, store))
    return records


def regrade(store: RunStore, rubric: Rubric, gateway: Gateway,
            run_ids: Sequence[str] | None = None,
            model: str | None = None) -> list[RunRecord]:
    """Re-grade stored outputs under a (possibly different) rubric without
    re-running the summarization stage. New records reference the originals
    via ``regrade_of``; the originals stay untouched."""
    existing = {r.id: r for r in store.load()}
    if run_ids is None:
        targets = [r for r in existing.values() if r.status == "ok" and r.output]
    else:
        targets = []
        for run_id in run_ids:
            if run_id not in existing:
                raise UnknownRun(f"no run {run_id!r} in plan {store.plan_id!r}")
            targets.append(existing[run_id])
    out = []
    for original in targets:
        started = _now()
        new_id = f"{original.id}-rg-{uuid.uuid4().hex[:8]}"
        try:
            if not original.output:
                raise UnknownRun(f"run {original.id!r} has no stored output to regrade")
            grade = grade_report(original.output, rubric, gateway,
                                 model=model or original.model)
            record = replace(
                original,
                id=new_id,
                status="ok",
                answers_text=grade.answers_text,
                grading_text=grade.grading_text,
                breakdown=grade.breakdown,
                error=None,
                regrade_of=original.id,
                provider=gateway.provider_name,
                started_at=started,
                finished_at=_now(),
            )
        except (SpacesteerError, GatewayError) as exc:
            record = replace(
                original,
                id=new_id,
                status="failed",
                answers_text=None,
                grading_text=None,
                breakdown=None,
                error=f"{type(exc).__name__}: {exc}",
                regrade_of=original.id,
                provider=gateway.provider_name,
                started_at=started,
                finished_at=_now(),
            )
        store.append(record)
        out.append(record)
    return out
