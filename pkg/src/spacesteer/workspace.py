"""Workspace data model.

A workspace is an immutable snapshot of a sensemaking space: source documents
plus the four layers a user lays over them while reading — relevance flags,
text highlights, free-text annotations, clusters, and connections. Values are
frozen dataclasses built on tuples so trial edits can never corrupt a shared
snapshot; every mutation goes through ``spacesteer.edits.apply_edit`` and
returns a new workspace.

The on-disk format is versioned JSON with sorted object keys, so serializing
the same workspace always produces identical bytes; array order inside the
file carries creation order and is preserved.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable

from .errors import MalformedFile, UnsupportedVersion

FORMAT_VERSION = 1

REF_KINDS = ("doc", "cluster", "text")


@dataclass(frozen=True)
class Document:
    id: str
    body: str
    title: str | None = None


@dataclass(frozen=True)
class Highlight:
    """One highlight act over ``body[start:end]`` of a document.

    ``text`` duplicates the covered slice on purpose: it keeps exported files
    reviewable and lets validation catch spans that drifted out of sync with
    an edited body.
    """

    doc_id: str
    start: int
    end: int
    text: str


@dataclass(frozen=True)
class Annotation:
    target: str  # a document id or a cluster id
    text: str


@dataclass(frozen=True)
class Cluster:
    id: str
    name: str | None = None
    members: tuple[str, ...] = ()


@dataclass(frozen=True)
class Ref:
    """Endpoint of a connection: a document, a cluster, or a literal text token."""

    kind: str
    value: str

    @classmethod
    def doc(cls, doc_id: str) -> "Ref":
        return cls("doc", doc_id)

    @classmethod
    def cluster(cls, cluster_id: str) -> "Ref":
        return cls("cluster", cluster_id)

    @classmethod
    def text(cls, token: str) -> "Ref":
        return cls("text", token)

    def render(self) -> str:
        """How the endpoint reads inside a compiled prompt: ids for objects,
        the token itself for text."""
        return self.value


@dataclass(frozen=True)
class Connection:
    source: Ref
    target: Ref
    label: str | None = None


@dataclass(frozen=True)
class Workspace:
    documents: tuple[Document, ...] = ()
    relevant: frozenset[str] = frozenset()
    highlights: tuple[Highlight, ...] = ()
    annotations: tuple[Annotation, ...] = ()
    clusters: tuple[Cluster, ...] = ()
    connections: tuple[Connection, ...] = ()
    version: int = FORMAT_VERSION

    # -- lookups ---------------------------------------------------------

    def document_ids(self) -> tuple[str, ...]:
        return tuple(d.id for d in self.documents)

    def get_document(self, doc_id: str) -> Document | None:
        for doc in self.documents:
            if doc.id == doc_id:
                return doc
        return None

    def get_cluster(self, cluster_id: str) -> Cluster | None:
        for cluster in self.clusters:
            if cluster.id == cluster_id:
                return cluster
        return None

    def cluster_of(self, doc_id: str) -> Cluster | None:
        for cluster in self.clusters:
            if doc_id in cluster.members:
                return cluster
        return None

    def relevant_documents(self) -> tuple[Document, ...]:
        """Documents flagged relevant, in original document order."""
        return tuple(d for d in self.documents if d.id in self.relevant)


@dataclass(frozen=True)
class Violation:
    entity: str
    rule: str
    message: str


def _check_highlight(ws: Workspace, i: int, h: Highlight, out: list[Violation]) -> None:
    entity = f"highlight[{i}]"
    doc = ws.get_document(h.doc_id)
    if doc is None:
        out.append(Violation(entity, "unknown-document",
                             f"highlight references missing document {h.doc_id!r}"))
        return
    if not (0 <= h.start < h.end <= len(doc.body)):
        out.append(Violation(entity, "span-out-of-range",
                             f"span [{h.start}, {h.end}) outside body of {h.doc_id!r}"))
        return
    if doc.body[h.start:h.end] != h.text:
        out.append(Violation(entity, "text-mismatch",
                             f"span [{h.start}, {h.end}) of {h.doc_id!r} does not read {h.text!r}"))


def validate(ws: Workspace) -> list[Violation]:
    """Check every structural invariant; an empty result means the workspace
    is valid. Never raises: callers decide what a violation costs."""
    out: list[Violation] = []

    doc_ids: set[str] = set()
    for doc in ws.documents:
        if not doc.id:
            out.append(Violation("document", "empty-id", "document with empty id"))
            continue
        if doc.id in doc_ids:
            out.append(Violation(doc.id, "duplicate-id", f"duplicate document id {doc.id!r}"))
        doc_ids.add(doc.id)
        if not doc.body:
            out.append(Violation(doc.id, "empty-body", f"document {doc.id!r} has an empty body"))

    for rid in sorted(ws.relevant):
        if rid not in doc_ids:
            out.append(Violation(rid, "unknown-relevant",
                                 f"relevant set references missing document {rid!r}"))

    for i, h in enumerate(ws.highlights):
        _check_highlight(ws, i, h, out)

    cluster_ids: set[str] = set()
    names_seen: set[str] = set()
    membership: dict[str, str] = {}
    for cluster in ws.clusters:
        if not cluster.id:
            out.append(Violation("cluster", "empty-id", "cluster with empty id"))
            continue
        if cluster.id in cluster_ids:
            out.append(Violation(cluster.id, "duplicate-id",
                                 f"duplicate cluster id {cluster.id!r}"))
        if cluster.id in doc_ids:
            out.append(Violation(cluster.id, "id-collision",
                                 f"cluster id {cluster.id!r} collides with a document id"))
        cluster_ids.add(cluster.id)
        if cluster.name is not None:
            if cluster.name in names_seen:
                out.append(Violation(cluster.id, "duplicate-cluster-name",
                                     f"cluster name {cluster.name!r} used more than once"))
            names_seen.add(cluster.name)
        seen_members: set[str] = set()
        for member in cluster.members:
            if member not in doc_ids:
                out.append(Violation(cluster.id, "unknown-member",
                                     f"cluster {cluster.id!r} lists missing document {member!r}"))
                continue
            if member in seen_members:
                out.append(Violation(cluster.id, "duplicate-member",
                                     f"cluster {cluster.id!r} lists {member!r} twice"))
            seen_members.add(member)
            if member in membership:
                out.append(Violation(member, "duplicate-membership",
                                     f"document {member!r} belongs to clusters "
                                     f"{membership[member]!r} and {cluster.id!r}"))
            else:
                membership[member] = cluster.id

    for i, a in enumerate(ws.annotations):
        entity = f"annotation[{i}]"
        if not a.text:
            out.append(Violation(entity, "empty-annotation", "annotation with empty text"))
        if a.target not in doc_ids and a.target not in cluster_ids:
            out.append(Violation(entity, "unknown-target",
                                 f"annotation targets missing object {a.target!r}"))

    for i, c in enumerate(ws.connections):
        entity = f"connection[{i}]"
        for side, ref in (("source", c.source), ("target", c.target)):
            if ref.kind not in REF_KINDS:
                out.append(Violation(entity, "bad-ref-kind",
                                     f"{side} has unknown kind {ref.kind!r}"))
            elif ref.kind == "doc" and ref.value not in doc_ids:
                out.append(Violation(entity, "unknown-endpoint",
                                     f"{side} references missing document {ref.value!r}"))
            elif ref.kind == "cluster" and ref.value not in cluster_ids:
                out.append(Violation(entity, "unknown-endpoint",
                                     f"{side} references missing cluster {ref.value!r}"))
            elif ref.kind == "text" and not ref.value:
                out.append(Violation(entity, "empty-text-endpoint",
                                     f"{side} is an empty text token"))
        if c.source == c.target:
            out.append(Violation(entity, "self-connection",
                                 "connection joins an object to itself"))

    return out


# -- serialization ----------------------------------------------------------


def _ref_to_dict(ref: Ref) -> dict[str, str]:
    return {ref.kind: ref.value}


def _ref_from_dict(raw: Any) -> Ref:
    if not isinstance(raw, dict) or len(raw) != 1:
        raise MalformedFile(f"connection endpoint must be a single-key object, got {raw!r}")
    kind, value = next(iter(raw.items()))
    if kind not in REF_KINDS:
        raise MalformedFile(f"unknown endpoint kind {kind!r}")
    if not isinstance(value, str):
        raise MalformedFile(f"endpoint value must be a string, got {value!r}")
    return Ref(kind, value)


def workspace_to_dict(ws: Workspace) -> dict[str, Any]:
    documents = []
    for d in ws.documents:
        entry: dict[str, Any] = {"id": d.id, "body": d.body}
        if d.title is not None:
            entry["title"] = d.title
        documents.append(entry)
    clusters = []
    for c in ws.clusters:
        entry = {"id": c.id, "members": list(c.members)}
        if c.name is not None:
            entry["name"] = c.name
        clusters.append(entry)
    connections = []
    for c in ws.connections:
        entry = {"source": _ref_to_dict(c.source), "target": _ref_to_dict(c.target)}
        if c.label is not None:
            entry["label"] = c.label
        connections.append(entry)
    return {
        "version": ws.version,
        "documents": documents,
        "relevant": sorted(ws.relevant),
        "highlights": [
            {"doc_id": h.doc_id, "start": h.start, "end": h.end, "text": h.text}
            for h in ws.highlights
        ],
        "annotations": [{"target": a.target, "text": a.text} for a in ws.annotations],
        "clusters": clusters,
        "connections": connections,
    }


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise MalformedFile(message)


def workspace_from_dict(raw: Any) -> Workspace:
    _require(isinstance(raw, dict), "workspace file must hold a JSON object")
    version = raw.get("version")
    _require(isinstance(version, int), "workspace version must be an integer")
    if version != FORMAT_VERSION:
        raise UnsupportedVersion(f"unsupported workspace version {version!r}")

    try:
        documents = tuple(
            Document(id=d["id"], body=d["body"], title=d.get("title"))
            for d in raw.get("documents", ())
        )
        relevant = frozenset(raw.get("relevant", ()))
        highlights = tuple(
            Highlight(doc_id=h["doc_id"], start=h["start"], end=h["end"], text=h["text"])
            for h in raw.get("highlights", ())
        )
        annotations = tuple(
            Annotation(target=a["target"], text=a["text"])
            for a in raw.get("annotations", ())
        )
        clusters = tuple(
            Cluster(id=c["id"], name=c.get("name"), members=tuple(c.get("members", ())))
            for c in raw.get("clusters", ())
        )
        connections = tuple(
            Connection(
                source=_ref_from_dict(c["source"]),
                target=_ref_from_dict(c["target"]),
                label=c.get("label"),
            )
            for c in raw.get("connections", ())
        )
    except (KeyError, TypeError) as exc:
        raise MalformedFile(f"workspace file does not match the schema: {exc}") from exc

    for doc in documents:
        _require(isinstance(doc.id, str) and isinstance(doc.body, str),
                 "document id and body must be strings")
    for h in highlights:
        _require(isinstance(h.start, int) and isinstance(h.end, int),
                 "highlight span bounds must be integers")
        _require(isinstance(h.doc_id, str) and isinstance(h.text, str),
                 "highlight doc_id and text must be strings")
    for rid in relevant:
        _require(isinstance(rid, str), "relevant entries must be strings")

    return Workspace(
        documents=documents,
        relevant=relevant,
        highlights=highlights,
        annotations=annotations,
        clusters=clusters,
        connections=connections,
        version=version,
    )


def serialize(ws: Workspace) -> bytes:
    """Canonical file bytes: sorted keys, two-space indent, trailing newline."""
    text = json.dumps(workspace_to_dict(ws), ensure_ascii=False, sort_keys=True, indent=2)
    return (text + "\n").encode("utf-8")


def deserialize(data: bytes | str) -> Workspace:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedFile(f"workspace file is not valid UTF-8: {exc}") from exc
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as exc:
        raise MalformedFile(f"workspace file is not valid JSON: {exc}") from exc
    return workspace_from_dict(raw)
