"""Prompt compiler: workspace layers -> chat messages.

The compiled prompt always has the same skeleton: a system message framing
the task, an assistant message dictating the output shape (BLUF first
paragraph, outline points, conclusions), a user message holding the document
corpus (all documents, the filtered subset, or the cluster structure), and an
optional second user message concatenating the enabled representation
sections in fixed order: annotations, highlights, connections.

All free text (framing, output shape, section lead-ins) comes from a template
file so the same compiler serves different analysis domains; the compiler
owns only the structure.

Rendering rules that matter for byte-stability:

* JSON blocks use two-space indent and insertion order. Document and cluster
  maps follow creation order, never alphabetical order.
* Structure keys are the cluster name when ``cluster_names`` is set and the
  cluster has one, else the synthetic ``cluster_k`` (1-based creation order).
* Text weights are always keyed by synthetic ``clusterk`` (no underscore),
  with texts of unclustered documents grouped under ``_unclustered``. The
  cluster_names flag does not leak names into the weights block.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Literal

from .canonical import digest_of
from .conditions import Condition
from .errors import MalformedFile, MissingLayer, NoClusters
from .workspace import Workspace

SECTION_ORDER = ("annotations", "highlights", "connections")

WeightsMethod = Literal["flat", "cluster_embedded"]


@dataclass(frozen=True)
class Message:
    role: str
    content: str


@dataclass(frozen=True)
class PromptTemplate:
    """Free text of a compiled prompt: task framing (system), output shape
    (assistant) and one lead-in per representation section."""

    system: str
    assistant: str
    lead_in: dict[str, str]
    weights_method: WeightsMethod = "cluster_embedded"

    def __post_init__(self) -> None:
        missing = [s for s in SECTION_ORDER if s not in self.lead_in]
        if missing:
            raise MalformedFile(f"template lacks lead-ins for: {missing}")
        if self.weights_method not in ("flat", "cluster_embedded"):
            raise MalformedFile(
                f"unknown weights_method {self.weights_method!r}")


def template_from_dict(raw: Any) -> PromptTemplate:
    if not isinstance(raw, dict):
        raise MalformedFile("template file must hold a JSON object")
    try:
        return PromptTemplate(
            system=raw["system"],
            assistant=raw["assistant"],
            lead_in=dict(raw["lead_in"]),
            weights_method=raw.get("weights_method", "cluster_embedded"),
        )
    except (KeyError, TypeError) as exc:
        raise MalformedFile(f"template file does not match the schema: {exc}") from exc


def load_template(path: str | Path) -> PromptTemplate:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MalformedFile(f"template file is not valid JSON: {exc}") from exc
    return template_from_dict(raw)


def load_default_template(name: str = "investigation") -> PromptTemplate:
    """Packaged templates: "investigation" (threat analysis reports) and
    "litreview" (literature survey)."""
    resource = f"template_{name}.json"
    try:
        data = resources.files("spacesteer.data").joinpath(resource).read_text("utf-8")
    except FileNotFoundError:
        raise MalformedFile(f"no packaged template named {name!r}") from None
    return template_from_dict(json.loads(data))


@dataclass(frozen=True)
class PromptBundle:
    messages: tuple[Message, ...]
    manifest: dict[str, Any] = field(default_factory=dict)

    def digest(self) -> str:
        return digest_of([{"role": m.role, "content": m.content} for m in self.messages])

    def to_dict(self) -> dict[str, Any]:
        return {
            "digest": self.digest(),
            "manifest": self.manifest,
            "messages": [{"role": m.role, "content": m.content} for m in self.messages],
        }


def bundle_from_dict(raw: Any) -> PromptBundle:
    try:
        messages = tuple(Message(m["role"], m["content"]) for m in raw["messages"])
        manifest = dict(raw.get("manifest", {}))
    except (KeyError, TypeError) as exc:
        raise MalformedFile(f"bundle does not match the schema: {exc}") from exc
    return PromptBundle(messages=messages, manifest=manifest)


def _json_block(value: Any) -> str:
    return json.dumps(value, ensure_ascii=False, indent=2)


# -- layer compilers ----------------------------------------------------------


def compile_text_level(
    ws: Workspace, method: WeightsMethod = "cluster_embedded"
) -> dict[str, Any]:
    """Highlighted texts with their weights (weight = number of highlight
    acts). ``flat`` maps text -> weight; ``cluster_embedded`` groups the map
    by the cluster holding each text's document."""
    if method == "flat":
        weights: dict[str, int] = {}
        for h in ws.highlights:
            weights[h.text] = weights.get(h.text, 0) + 1
        return weights

    if method != "cluster_embedded":
        raise ValueError(f"unknown weights method {method!r}")
    if not ws.clusters:
        raise NoClusters("cluster_embedded weights need at least one cluster")

    keys = {c.id: f"cluster{k}" for k, c in enumerate(ws.clusters, start=1)}
    grouped: dict[str, dict[str, int]] = {}
    unclustered: dict[str, int] = {}
    for h in ws.highlights:
        owner = ws.cluster_of(h.doc_id)
        bucket = grouped.setdefault(keys[owner.id], {}) if owner else unclustered
        bucket[h.text] = bucket.get(h.text, 0) + 1
    # emit groups in cluster creation order, then the unclustered leftovers
    out: dict[str, dict[str, int]] = {}
    for key in keys.values():
        if key in grouped:
            out[key] = grouped[key]
    if unclustered:
        out["_unclustered"] = unclustered
    return out


def compile_insight_level(ws: Workspace) -> list[dict[str, str]]:
    """Annotations as node/annotation pairs in creation order."""
    return [{"node": a.target, "annotation": a.text} for a in ws.annotations]


def compile_structure_level(ws: Workspace, use_names: bool) -> dict[str, dict[str, str]]:
    """Clusters as a map keyed by cluster name (when requested and present)
    or synthetic ``cluster_k``; values map member document id -> body."""
    if not ws.clusters:
        raise NoClusters("the workspace has no clusters")
    out: dict[str, dict[str, str]] = {}
    for k, cluster in enumerate(ws.clusters, start=1):
        key = cluster.name if use_names and cluster.name else f"cluster_{k}"
        if key in out:  # a literal name shadowing a synthetic key
            key = f"{key}_{k}"
        members: dict[str, str] = {}
        for member in cluster.members:
            doc = ws.get_document(member)
            if doc is None:
                raise MalformedFile(f"cluster {cluster.id!r} lists missing document {member!r}")
            members[member] = doc.body
        out[key] = members
    return out


def compile_connections(ws: Workspace) -> list[list[str]]:
    """Connections as [source, target, label] triples in creation order."""
    return [
        [c.source.render(), c.target.render(), c.label or ""]
        for c in ws.connections
    ]


# -- assembly -----------------------------------------------------------------


def _check_layers(ws: Workspace, condition: Condition) -> None:
    if condition.filtering and not ws.relevant:
        raise MissingLayer(f"{condition.name}: filtering enabled but no document "
                           f"is flagged relevant")
    if condition.clustering and not ws.clusters:
        raise NoClusters(f"{condition.name}: clustering enabled but the workspace "
                         f"has no clusters")
    if condition.cluster_names and not any(c.name for c in ws.clusters):
        raise MissingLayer(f"{condition.name}: cluster_names enabled but no cluster "
                           f"has a name")
    if condition.highlights and not ws.highlights:
        raise MissingLayer(f"{condition.name}: highlights enabled but the workspace "
                           f"has none")
    if condition.annotations and not ws.annotations:
        raise MissingLayer(f"{condition.name}: annotations enabled but the workspace "
                           f"has none")
    if condition.connections and not ws.connections:
        raise MissingLayer(f"{condition.name}: connections enabled but the workspace "
                           f"has none")


def assemble_prompt(
    ws: Workspace, condition: Condition, template: PromptTemplate
) -> PromptBundle:
    """Compile the workspace under a condition into a complete prompt bundle.

    An enabled flag whose layer is empty raises (MissingLayer / NoClusters)
    rather than silently emitting less than the condition promises; the
    returned manifest lists exactly the sections present in the text.
    """
    _check_layers(ws, condition)

    manifest: dict[str, Any] = {
        "documents": "all",
        "cluster_names": False,
        "annotations": False,
        "highlights": False,
        "connections": False,
    }

    if condition.clustering:
        structure = compile_structure_level(ws, use_names=condition.cluster_names)
        part_one = _json_block(structure)
        manifest["documents"] = "structure"
        manifest["cluster_names"] = condition.cluster_names
    elif condition.filtering:
        docs = {d.id: d.body for d in ws.relevant_documents()}
        part_one = _json_block(docs)
        manifest["documents"] = "relevant"
    else:
        docs = {d.id: d.body for d in ws.documents}
        part_one = _json_block(docs)

    sections: list[str] = []
    if condition.annotations:
        block = _json_block(compile_insight_level(ws))
        sections.append(f"{template.lead_in['annotations']}\n\n{block}")
        manifest["annotations"] = True
    if condition.highlights:
        method: WeightsMethod = template.weights_method
        if method == "cluster_embedded" and not ws.clusters:
            method = "flat"
        block = _json_block(compile_text_level(ws, method))
        sections.append(f"{template.lead_in['highlights']}\n\n{block}")
        manifest["highlights"] = True
    if condition.connections:
        block = _json_block(compile_connections(ws))
        sections.append(f"{template.lead_in['connections']}\n\n{block}")
        manifest["connections"] = True

    messages = [
        Message("system", template.system),
        Message("assistant", template.assistant),
        Message("user", part_one),
    ]
    if sections:
        messages.append(Message("user", "\n\n".join(sections)))

    return PromptBundle(messages=tuple(messages), manifest=manifest)
