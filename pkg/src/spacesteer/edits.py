"""Workspace edits.

Each edit is a small frozen dataclass; ``apply_edit`` checks it against the
current workspace and either returns a new workspace or raises without
touching anything, so a rejected edit can never leave partial state behind.
The wire format used by the HTTP service is ``{"type": "<tag>", ...fields}``
with snake_case tags.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any, Union

from .errors import (
    DuplicateId,
    DuplicateMembership,
    InvalidEdit,
    SpanOutOfRange,
    UnresolvedReference,
)
from .workspace import (
    Annotation,
    Connection,
    Cluster,
    Document,
    Highlight,
    Ref,
    Workspace,
)


@dataclass(frozen=True)
class AddDocument:
    document: Document


@dataclass(frozen=True)
class SetRelevance:
    doc_id: str
    relevant: bool


@dataclass(frozen=True)
class AddHighlight:
    highlight: Highlight


@dataclass(frozen=True)
class RemoveHighlight:
    index: int


@dataclass(frozen=True)
class AddAnnotation:
    annotation: Annotation


@dataclass(frozen=True)
class RemoveAnnotation:
    index: int


@dataclass(frozen=True)
class CreateCluster:
    cluster_id: str
    name: str | None = None
    members: tuple[str, ...] = ()


@dataclass(frozen=True)
class RenameCluster:
    cluster_id: str
    name: str | None


@dataclass(frozen=True)
class AssignToCluster:
    doc_id: str
    cluster_id: str


@dataclass(frozen=True)
class RemoveFromCluster:
    doc_id: str
    cluster_id: str


@dataclass(frozen=True)
class AddConnection:
    connection: Connection


@dataclass(frozen=True)
class RemoveConnection:
    index: int


WorkspaceEdit = Union[
    AddDocument,
    SetRelevance,
    AddHighlight,
    RemoveHighlight,
    AddAnnotation,
    RemoveAnnotation,
    CreateCluster,
    RenameCluster,
    AssignToCluster,
    RemoveFromCluster,
    AddConnection,
    RemoveConnection,
]


def _require_document(ws: Workspace, doc_id: str) -> Document:
    doc = ws.get_document(doc_id)
    if doc is None:
        raise UnresolvedReference(f"no document {doc_id!r}")
    return doc


def _require_cluster(ws: Workspace, cluster_id: str) -> Cluster:
    cluster = ws.get_cluster(cluster_id)
    if cluster is None:
        raise UnresolvedReference(f"no cluster {cluster_id!r}")
    return cluster


def _check_index(length: int, index: int, what: str) -> None:
    if not (0 <= index < length):
        raise UnresolvedReference(f"{what} index {index} out of range (size {length})")


def _check_ref(ws: Workspace, ref: Ref, side: str) -> None:
    if ref.kind == "doc":
        _require_document(ws, ref.value)
    elif ref.kind == "cluster":
        _require_cluster(ws, ref.value)
    elif ref.kind == "text":
        if not ref.value:
            raise InvalidEdit(f"{side} text token is empty")
    else:
        raise InvalidEdit(f"{side} has unknown ref kind {ref.kind!r}")


def apply_edit(ws: Workspace, edit: WorkspaceEdit) -> Workspace:
    """Apply one edit atomically, returning the updated workspace."""
    if isinstance(edit, AddDocument):
        doc = edit.document
        if not doc.id:
            raise InvalidEdit("document id is empty")
        if not doc.body:
            raise InvalidEdit(f"document {doc.id!r} has an empty body")
        if ws.get_document(doc.id) is not None or ws.get_cluster(doc.id) is not None:
            raise DuplicateId(f"id {doc.id!r} already in use")
        return replace(ws, documents=ws.documents + (doc,))

    if isinstance(edit, SetRelevance):
        _require_document(ws, edit.doc_id)
        relevant = set(ws.relevant)
        if edit.relevant:
            relevant.add(edit.doc_id)
        else:
            relevant.discard(edit.doc_id)
        return replace(ws, relevant=frozenset(relevant))

    if isinstance(edit, AddHighlight):
        h = edit.highlight
        doc = _require_document(ws, h.doc_id)
        if not (0 <= h.start < h.end <= len(doc.body)):
            raise SpanOutOfRange(
                f"span [{h.start}, {h.end}) outside body of {h.doc_id!r}")
        if doc.body[h.start:h.end] != h.text:
            raise SpanOutOfRange(
                f"span [{h.start}, {h.end}) of {h.doc_id!r} does not read {h.text!r}")
        return replace(ws, highlights=ws.highlights + (h,))

    if isinstance(edit, RemoveHighlight):
        _check_index(len(ws.highlights), edit.index, "highlight")
        kept = ws.highlights[:edit.index] + ws.highlights[edit.index + 1:]
        return replace(ws, highlights=kept)

    if isinstance(edit, AddAnnotation):
        a = edit.annotation
        if not a.text:
            raise InvalidEdit("annotation text is empty")
        if ws.get_document(a.target) is None and ws.get_cluster(a.target) is None:
            raise UnresolvedReference(f"annotation target {a.target!r} does not exist")
        return replace(ws, annotations=ws.annotations + (a,))

    if isinstance(edit, RemoveAnnotation):
        _check_index(len(ws.annotations), edit.index, "annotation")
        kept = ws.annotations[:edit.index] + ws.annotations[edit.index + 1:]
        return replace(ws, annotations=kept)

    if isinstance(edit, CreateCluster):
        if not edit.cluster_id:
            raise InvalidEdit("cluster id is empty")
        if ws.get_cluster(edit.cluster_id) is not None or ws.get_document(edit.cluster_id) is not None:
            raise DuplicateId(f"id {edit.cluster_id!r} already in use")
        if edit.name is not None and any(c.name == edit.name for c in ws.clusters):
            raise DuplicateId(f"cluster name {edit.name!r} already in use")
        seen: set[str] = set()
        for member in edit.members:
            _require_document(ws, member)
            if member in seen:
                raise DuplicateMembership(f"document {member!r} listed twice")
            seen.add(member)
            owner = ws.cluster_of(member)
            if owner is not None:
                raise DuplicateMembership(
                    f"document {member!r} already belongs to cluster {owner.id!r}")
        cluster = Cluster(id=edit.cluster_id, name=edit.name, members=tuple(edit.members))
        return replace(ws, clusters=ws.clusters + (cluster,))

    if isinstance(edit, RenameCluster):
        cluster = _require_cluster(ws, edit.cluster_id)
        if edit.name is not None and any(
                c.name == edit.name and c.id != cluster.id for c in ws.clusters):
            raise DuplicateId(f"cluster name {edit.name!r} already in use")
        clusters = tuple(
            replace(c, name=edit.name) if c.id == cluster.id else c for c in ws.clusters)
        return replace(ws, clusters=clusters)

    if isinstance(edit, AssignToCluster):
        _require_document(ws, edit.doc_id)
        _require_cluster(ws, edit.cluster_id)
        owner = ws.cluster_of(edit.doc_id)
        if owner is not None:
            raise DuplicateMembership(
                f"document {edit.doc_id!r} already belongs to cluster {owner.id!r}")
        clusters = tuple(
            replace(c, members=c.members + (edit.doc_id,)) if c.id == edit.cluster_id else c
            for c in ws.clusters)
        return replace(ws, clusters=clusters)

    if isinstance(edit, RemoveFromCluster):
        cluster = _require_cluster(ws, edit.cluster_id)
        if edit.doc_id not in cluster.members:
            raise UnresolvedReference(
                f"document {edit.doc_id!r} is not a member of cluster {edit.cluster_id!r}")
        clusters = tuple(
            replace(c, members=tuple(m for m in c.members if m != edit.doc_id))
            if c.id == cluster.id else c
            for c in ws.clusters)
        return replace(ws, clusters=clusters)

    if isinstance(edit, AddConnection):
        conn = edit.connection
        _check_ref(ws, conn.source, "source")
        _check_ref(ws, conn.target, "target")
        if conn.source == conn.target:
            raise InvalidEdit("connection joins an object to itself")
        return replace(ws, connections=ws.connections + (conn,))

    if isinstance(edit, RemoveConnection):
        _check_index(len(ws.connections), edit.index, "connection")
        kept = ws.connections[:edit.index] + ws.connections[edit.index + 1:]
        return replace(ws, connections=kept)

    raise InvalidEdit(f"unknown edit {edit!r}")


# -- wire format --------------------------------------------------------------

_EDIT_TAGS = {
    "add_document": AddDocument,
    "set_relevance": SetRelevance,
    "add_highlight": AddHighlight,
    "remove_highlight": RemoveHighlight,
    "add_annotation": AddAnnotation,
    "remove_annotation": RemoveAnnotation,
    "create_cluster": CreateCluster,
    "rename_cluster": RenameCluster,
    "assign_to_cluster": AssignToCluster,
    "remove_from_cluster": RemoveFromCluster,
    "add_connection": AddConnection,
    "remove_connection": RemoveConnection,
}


def _ref_from_wire(raw: Any, side: str) -> Ref:
    if not isinstance(raw, dict) or len(raw) != 1:
        raise InvalidEdit(f"{side} must be a single-key object like {{\"doc\": id}}")
    kind, value = next(iter(raw.items()))
    if not isinstance(value, str):
        raise InvalidEdit(f"{side} value must be a string")
    return Ref(kind, value)


def parse_edit(raw: Any) -> WorkspaceEdit:
    """Parse the JSON wire form of an edit. Raises InvalidEdit on anything
    that does not match the schema; referential checks happen in apply_edit."""
    if not isinstance(raw, dict):
        raise InvalidEdit("edit must be a JSON object")
    tag = raw.get("type")
    cls = _EDIT_TAGS.get(tag)
    if cls is None:
        raise InvalidEdit(f"unknown edit type {tag!r}")
    try:
        if cls is AddDocument:
            return AddDocument(Document(
                id=raw["id"], body=raw["body"], title=raw.get("title")))
        if cls is SetRelevance:
            return SetRelevance(doc_id=raw["doc_id"], relevant=bool(raw["relevant"]))
        if cls is AddHighlight:
            return AddHighlight(Highlight(
                doc_id=raw["doc_id"], start=int(raw["start"]),
                end=int(raw["end"]), text=raw["text"]))
        if cls is RemoveHighlight:
            return RemoveHighlight(index=int(raw["index"]))
        if cls is AddAnnotation:
            return AddAnnotation(Annotation(target=raw["target"], text=raw["text"]))
        if cls is RemoveAnnotation:
            return RemoveAnnotation(index=int(raw["index"]))
        if cls is CreateCluster:
            return CreateCluster(
                cluster_id=raw["cluster_id"], name=raw.get("name"),
                members=tuple(raw.get("members", ())))
        if cls is RenameCluster:
            return RenameCluster(cluster_id=raw["cluster_id"], name=raw.get("name"))
        if cls is AssignToCluster:
            return AssignToCluster(doc_id=raw["doc_id"], cluster_id=raw["cluster_id"])
        if cls is RemoveFromCluster:
            return RemoveFromCluster(doc_id=raw["doc_id"], cluster_id=raw["cluster_id"])
        if cls is AddConnection:
            return AddConnection(Connection(
                source=_ref_from_wire(raw["source"], "source"),
                target=_ref_from_wire(raw["target"], "target"),
                label=raw.get("label")))
        if cls is RemoveConnection:
            return RemoveConnection(index=int(raw["index"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidEdit(f"bad payload for edit {tag!r}: {exc}") from exc
    raise InvalidEdit(f"unknown edit type {tag!r}")


def edit_to_dict(edit: WorkspaceEdit) -> dict[str, Any]:
    if isinstance(edit, AddDocument):
        out: dict[str, Any] = {"type": "add_document", "id": edit.document.id,
                               "body": edit.document.body}
        if edit.document.title is not None:
            out["title"] = edit.document.title
        return out
    if isinstance(edit, SetRelevance):
        return {"type": "set_relevance", "doc_id": edit.doc_id, "relevant": edit.relevant}
    if isinstance(edit, AddHighlight):
        h = edit.highlight
        return {"type": "add_highlight", "doc_id": h.doc_id,
                "start": h.start, "end": h.end, "text": h.text}
    if isinstance(edit, RemoveHighlight):
        return {"type": "remove_highlight", "index": edit.index}
    if isinstance(edit, AddAnnotation):
        return {"type": "add_annotation", "target": edit.annotation.target,
                "text": edit.annotation.text}
    if isinstance(edit, RemoveAnnotation):
        return {"type": "remove_annotation", "index": edit.index}
    if isinstance(edit, CreateCluster):
        out = {"type": "create_cluster", "cluster_id": edit.cluster_id,
               "members": list(edit.members)}
        if edit.name is not None:
            out["name"] = edit.name
        return out
    if isinstance(edit, RenameCluster):
        return {"type": "rename_cluster", "cluster_id": edit.cluster_id, "name": edit.name}
    if isinstance(edit, AssignToCluster):
        return {"type": "assign_to_cluster", "doc_id": edit.doc_id,
                "cluster_id": edit.cluster_id}
    if isinstance(edit, RemoveFromCluster):
        return {"type": "remove_from_cluster", "doc_id": edit.doc_id,
                "cluster_id": edit.cluster_id}
    if isinstance(edit, AddConnection):
        c = edit.connection
        out = {"type": "add_connection",
               "source": {c.source.kind: c.source.value},
               "target": {c.target.kind: c.target.value}}
        if c.label is not None:
            out["label"] = c.label
        return out
    if isinstance(edit, RemoveConnection):
        return {"type": "remove_connection", "index": edit.index}
    raise InvalidEdit(f"unknown edit {edit!r}")
