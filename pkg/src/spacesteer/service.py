"""JSON-over-HTTP service around the workspace, compiler, and run pipeline.

One process hosts one ApiSession: a set of named workspaces (each with a
monotonically increasing edit sequence and its own lock, so concurrent edits
serialize per workspace), a gateway (mock unless LLM_API_KEY is set — the
service never talks to a live provider implicitly), and a run store root.

Edit responses always carry the workspace's current sequence number;
rejected edits return the violations and leave the sequence unchanged, which
is what lets an optimistic UI detect staleness and reconcile.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse

from . import analytics
from .compiler import PromptTemplate, assemble_prompt, load_default_template
from .conditions import PRESETS, get_condition
from .edits import apply_edit as apply_workspace_edit
from .edits import parse_edit
from .errors import (
    GatewayError,
    NoData,
    SpacesteerError,
    UnknownCondition,
    UnknownRun,
    UnknownWorkspace,
    ValidationError,
)
from .gateway import Gateway, gateway_from_env
from .harness import RunRecord, RunStore, make_plan, run_single
from .rubric import Rubric, load_default_rubric
from .workspace import Workspace, deserialize, validate, workspace_to_dict

DEFAULT_RUN_TEMPERATURE = 0.7


@dataclass
class WorkspaceState:
    workspace: Workspace
    sequence: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock)


class ApiSession:
    """Shared state behind the HTTP endpoints; usable directly in tests."""

    def __init__(self,
                 gateway: Gateway | None = None,
                 template: PromptTemplate | None = None,
                 rubric: Rubric | None = None,
                 store_root: str | Path = "runs") -> None:
        self.gateway = gateway if gateway is not None else gateway_from_env()
        self.template = template if template is not None else load_default_template()
        self.rubric = rubric if rubric is not None else load_default_rubric()
        self.store_root = Path(store_root)
        self.workspaces: dict[str, WorkspaceState] = {}
        self._records: dict[str, RunRecord] = {}
        self._stores: dict[str, RunStore] = {}

    # -- workspaces ------------------------------------------------------

    def add_workspace(self, workspace_id: str, workspace: Workspace) -> None:
        self.workspaces[workspace_id] = WorkspaceState(workspace=workspace)

    def load_workspace_file(self, path: str | Path) -> str:
        path = Path(path)
        workspace_id = path.stem
        self.add_workspace(workspace_id, deserialize(path.read_bytes()))
        return workspace_id

    def state_of(self, workspace_id: str) -> WorkspaceState:
        state = self.workspaces.get(workspace_id)
        if state is None:
            raise UnknownWorkspace(f"no workspace {workspace_id!r}")
        return state

    def apply_edit(self, workspace_id: str, raw_edit: Any) -> dict[str, Any]:
        state = self.state_of(workspace_id)
        with state.lock:
            try:
                edit = parse_edit(raw_edit)
                state.workspace = apply_workspace_edit(state.workspace, edit)
            except ValidationError as exc:
                return {
                    "applied": False,
                    "sequence": state.sequence,
                    "violations": [{
                        "entity": workspace_id,
                        "rule": type(exc).__name__,
                        "message": str(exc),
                    }],
                }
            state.sequence += 1
            return {"applied": True, "sequence": state.sequence, "violations": []}

    # -- runs ------------------------------------------------------------

    def store_for(self, plan_id: str) -> RunStore:
        if plan_id not in self._stores:
            self._stores[plan_id] = RunStore(self.store_root, plan_id)
        return self._stores[plan_id]

    def run_condition(self, workspace_id: str, condition_name: str,
                      temperature: float | None) -> RunRecord:
        state = self.state_of(workspace_id)
        condition = get_condition(condition_name)
        if temperature is None:
            temperature = DEFAULT_RUN_TEMPERATURE
        plan_id = f"adhoc-{workspace_id}"
        with state.lock:
            workspace = state.workspace
        plan = make_plan(
            plan_id=plan_id,
            workspace=workspace,
            conditions=[condition],
            replications=1,
            temperature_schedule=[temperature],
            rubric=self.rubric,
            template=self.template,
        )
        record = run_single(plan, condition, 1, self.gateway,
                            store=self.store_for(plan_id))
        self._records[record.id] = record
        return record

    def get_record(self, run_id: str) -> RunRecord:
        if run_id in self._records:
            return self._records[run_id]
        for store in self._stores.values():
            try:
                return store.get(run_id)
            except UnknownRun:
                continue
        raise UnknownRun(f"no run {run_id!r}")

    def plan_stats(self, plan_id: str) -> list[analytics.ConditionSummary]:
        store = self.store_for(plan_id)
        records = store.load()
        if not records:
            raise UnknownRun(f"no records for plan {plan_id!r}")
        return analytics.summarize_all(records)


def _error_response(exc: SpacesteerError) -> JSONResponse:
    payload = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, (UnknownWorkspace, UnknownRun, UnknownCondition, NoData)):
        return JSONResponse(payload, status_code=404)
    if isinstance(exc, GatewayError):
        return JSONResponse(payload, status_code=502)
    return JSONResponse(payload, status_code=422)


def create_app(session: ApiSession) -> FastAPI:
    app = FastAPI(title="spacesteer", docs_url=None, redoc_url=None)

    @app.exception_handler(SpacesteerError)
    async def _handle_domain_error(request: Request, exc: SpacesteerError):
        return _error_response(exc)

    @app.get("/health")
    def health() -> dict[str, Any]:
        return {
            "status": "ok",
            "provider": session.gateway.provider_name,
            "workspaces": sorted(session.workspaces),
        }

    @app.get("/conditions")
    def conditions() -> list[dict[str, Any]]:
        return [c.to_dict() for c in PRESETS.values()]

    @app.get("/baseline")
    def baseline() -> dict[str, Any]:
        return analytics.HUMAN_BASELINE.to_dict()

    @app.get("/workspaces")
    def list_workspaces() -> list[dict[str, Any]]:
        return [
            {"id": workspace_id, "sequence": state.sequence}
            for workspace_id, state in sorted(session.workspaces.items())
        ]

    @app.get("/workspaces/{workspace_id}")
    def get_workspace(workspace_id: str) -> dict[str, Any]:
        state = session.state_of(workspace_id)
        with state.lock:
            return {
                "id": workspace_id,
                "sequence": state.sequence,
                "workspace": workspace_to_dict(state.workspace),
                "violations": [
                    {"entity": v.entity, "rule": v.rule, "message": v.message}
                    for v in validate(state.workspace)
                ],
            }

    @app.post("/workspaces/{workspace_id}/edits")
    def post_edit(workspace_id: str, edit: dict[str, Any]) -> JSONResponse:
        result = session.apply_edit(workspace_id, edit)
        status = 200 if result["applied"] else 422
        return JSONResponse(result, status_code=status)

    @app.get("/workspaces/{workspace_id}/prompt")
    def get_prompt(workspace_id: str,
                   condition: str = Query(...)) -> dict[str, Any]:
        state = session.state_of(workspace_id)
        cond = get_condition(condition)
        with state.lock:
            bundle = assemble_prompt(state.workspace, cond, session.template)
            return {"condition": cond.name, "sequence": state.sequence,
                    **bundle.to_dict()}

    @app.post("/workspaces/{workspace_id}/runs")
    def post_run(workspace_id: str, body: dict[str, Any]) -> dict[str, Any]:
        condition = body.get("condition")
        if not isinstance(condition, str):
            raise UnknownCondition("request body needs a condition name")
        temperature = body.get("temperature")
        if temperature is not None:
            temperature = float(temperature)
        record = session.run_condition(workspace_id, condition, temperature)
        return record.to_dict()

    @app.get("/runs/{run_id}")
    def get_run(run_id: str) -> dict[str, Any]:
        return session.get_record(run_id).to_dict()

    @app.get("/plans/{plan_id}/stats")
    def get_stats(plan_id: str, format: str = Query("json")) -> Any:
        summaries = session.plan_stats(plan_id)
        if format == "json":
            import json as _json
            return _json.loads(analytics.export_summaries(summaries, "json"))
        if format == "boxplot-json":
            import json as _json
            return _json.loads(analytics.export_summaries(summaries, "boxplot-json"))
        raise NoData(f"unknown stats format {format!r}")

    return app
