"""Whiteboard export ingest.

Maps a board export (a flat JSON array of elements: frames, cards, stickies,
marks, connectors) onto a workspace. The mapping rules live in
docs/board_export_schema.md; the short version:

* frame -> cluster (frame title becomes the cluster name)
* card -> document (card title is the document id, card text the body);
  a titled sticky outside any card is a document too
* mark over card text -> highlight; a mark joined to other marks by
  connectors contributes one highlight per incident text link (degree
  weighting), never fewer than one
* untitled sticky -> annotation on its parent card's document or parent
  frame's cluster; a parentless sticky resolves by bounding-box overlap, and
  one overlapping several cards is ambiguous (error), one overlapping none
  is skipped as a floating note
* connector -> connection; endpoints resolve to the document (card), the
  cluster (frame), or the literal marked text (mark)

Every imported document is flagged relevant: presence on the board is the
filtering act. Every element lands in the mapping report exactly once,
either as a created entity or as a skip with a reason.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable

from .errors import AmbiguousParent, MalformedExport
from .workspace import (
    Annotation,
    Cluster,
    Connection,
    Document,
    Highlight,
    Ref,
    Workspace,
)

ELEMENT_KINDS = ("frame", "card", "sticky", "mark", "connector")


@dataclass(frozen=True)
class BoardElement:
    id: str
    kind: str
    title: str | None = None
    text: str | None = None
    parent: str | None = None
    span: tuple[int, int] | None = None
    source: str | None = None
    target: str | None = None
    bbox: tuple[float, float, float, float] | None = None


@dataclass(frozen=True)
class BoardExport:
    elements: tuple[BoardElement, ...]

    def get(self, element_id: str) -> BoardElement | None:
        for element in self.elements:
            if element.id == element_id:
                return element
        return None


@dataclass(frozen=True)
class Disposition:
    element_id: str
    kind: str
    mapped_as: str | None  # "document" | "cluster" | "highlight" | ...
    target: str | None = None  # id of the created entity, where one exists
    reason: str | None = None  # why the element was skipped


@dataclass(frozen=True)
class MappingReport:
    entries: tuple[Disposition, ...]

    def skipped(self) -> tuple[Disposition, ...]:
        return tuple(e for e in self.entries if e.mapped_as is None)

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for entry in self.entries:
            key = entry.mapped_as or "skipped"
            out[key] = out.get(key, 0) + 1
        return out


def _element_from_dict(raw: Any) -> BoardElement:
    if not isinstance(raw, dict):
        raise MalformedExport(f"board element must be an object, got {raw!r}")
    kind = raw.get("kind")
    if kind not in ELEMENT_KINDS:
        raise MalformedExport(f"unknown element kind {kind!r}")
    element_id = raw.get("id")
    if not isinstance(element_id, str) or not element_id:
        raise MalformedExport(f"element of kind {kind!r} lacks an id")
    span = raw.get("span")
    if span is not None:
        try:
            start, end = span
            span = (int(start), int(end))
        except (TypeError, ValueError) as exc:
            raise MalformedExport(f"{element_id}: bad span {span!r}") from exc
    bbox = raw.get("bbox")
    if bbox is not None:
        try:
            x, y, w, h = bbox
            bbox = (float(x), float(y), float(w), float(h))
        except (TypeError, ValueError) as exc:
            raise MalformedExport(f"{element_id}: bad bbox {bbox!r}") from exc
    return BoardElement(
        id=element_id,
        kind=kind,
        title=raw.get("title"),
        text=raw.get("text"),
        parent=raw.get("parent"),
        span=span,
        source=raw.get("source"),
        target=raw.get("target"),
        bbox=bbox,
    )


def parse_board(data: bytes | str | list) -> BoardExport:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedExport(f"board export is not valid UTF-8: {exc}") from exc
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise MalformedExport(f"board export is not valid JSON: {exc}") from exc
    if not isinstance(data, list):
        raise MalformedExport("board export must be a JSON array of elements")
    elements = tuple(_element_from_dict(raw) for raw in data)
    ids: set[str] = set()
    for element in elements:
        if element.id in ids:
            raise MalformedExport(f"duplicate element id {element.id!r}")
        ids.add(element.id)
    for element in elements:
        if element.parent is not None and element.parent not in ids:
            raise MalformedExport(
                f"{element.id}: parent {element.parent!r} does not exist")
    return BoardExport(elements=elements)


def _overlaps(a: tuple[float, float, float, float],
              b: tuple[float, float, float, float]) -> bool:
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    return ax < bx + bw and bx < ax + aw and ay < by + bh and by < ay + ah


def _resolve_parent(sticky: BoardElement, cards: list[BoardElement],
                    frames: list[BoardElement]) -> BoardElement | None:
    """Geometric fallback for stickies without an explicit parent."""
    if sticky.bbox is None:
        return None
    over_cards = [c for c in cards if c.bbox and _overlaps(sticky.bbox, c.bbox)]
    if len(over_cards) > 1:
        raise AmbiguousParent(
            f"sticky {sticky.id!r} overlaps cards "
            f"{[c.id for c in over_cards]} with no explicit parent")
    if over_cards:
        return over_cards[0]
    over_frames = [f for f in frames if f.bbox and _overlaps(sticky.bbox, f.bbox)]
    if len(over_frames) > 1:
        raise AmbiguousParent(
            f"sticky {sticky.id!r} overlaps frames "
            f"{[f.id for f in over_frames]} with no explicit parent")
    if over_frames:
        return over_frames[0]
    return None


def import_board(export: BoardExport) -> tuple[Workspace, MappingReport]:
    """Map every element, build the workspace, and report the disposition of
    each element. Raises MalformedExport / AmbiguousParent on exports that
    cannot be mapped faithfully."""
    frames = [e for e in export.elements if e.kind == "frame"]
    cards = [e for e in export.elements if e.kind == "card"]
    stickies = [e for e in export.elements if e.kind == "sticky"]
    marks = [e for e in export.elements if e.kind == "mark"]
    connectors = [e for e in export.elements if e.kind == "connector"]

    dispositions: dict[str, Disposition] = {}

    def note(element: BoardElement, mapped_as: str | None,
             target: str | None = None, reason: str | None = None) -> None:
        dispositions[element.id] = Disposition(
            element_id=element.id, kind=element.kind,
            mapped_as=mapped_as, target=target, reason=reason)

    # clusters from frames, in board order
    cluster_names: dict[str, str | None] = {}
    cluster_members: dict[str, list[str]] = {}
    for frame in frames:
        cluster_names[frame.id] = frame.title or None
        cluster_members[frame.id] = []
        note(frame, "cluster", target=frame.id)

    # documents from cards and titled stickies, in board order
    documents: list[Document] = []
    doc_ids: set[str] = set()
    element_to_doc: dict[str, str] = {}

    def add_document(element: BoardElement) -> None:
        title = (element.title or "").strip()
        body = element.text or ""
        if not title:
            note(element, None, reason="untitled card")
            return
        if not body:
            note(element, None, reason="empty card")
            return
        if title in doc_ids:
            raise MalformedExport(
                f"{element.id}: duplicate document id {title!r}")
        documents.append(Document(id=title, body=body))
        doc_ids.add(title)
        element_to_doc[element.id] = title
        if element.parent in cluster_members:
            cluster_members[element.parent].append(title)
        note(element, "document", target=title)

    document_stickies = []
    for sticky in stickies:
        parent = export.get(sticky.parent) if sticky.parent else None
        is_document = bool((sticky.title or "").strip()) and (
            parent is None or parent.kind == "frame")
        if is_document:
            document_stickies.append(sticky)
    doc_elements = sorted(
        cards + document_stickies,
        key=lambda e: next(i for i, el in enumerate(export.elements) if el.id == e.id))
    for element in doc_elements:
        add_document(element)

    # highlights from marks; degree weighting resolved after connectors
    mark_doc: dict[str, str] = {}
    mark_span: dict[str, tuple[int, int]] = {}
    mark_text: dict[str, str] = {}
    doc_bodies = {d.id: d.body for d in documents}
    for mark in marks:
        parent = export.get(mark.parent) if mark.parent else None
        if parent is None or parent.id not in element_to_doc:
            note(mark, None, reason="mark not attached to a document")
            continue
        text = mark.text or ""
        if not text:
            note(mark, None, reason="empty mark")
            continue
        doc_id = element_to_doc[parent.id]
        body = doc_bodies[doc_id]
        if mark.span is not None:
            start, end = mark.span
            if not (0 <= start < end <= len(body)) or body[start:end] != text:
                raise MalformedExport(
                    f"{mark.id}: span {mark.span} of {doc_id!r} does not read {text!r}")
        else:
            found = body.find(text)
            if found < 0:
                note(mark, None, reason="marked text not found in document body")
                continue
            start, end = found, found + len(text)
        mark_doc[mark.id] = doc_id
        mark_span[mark.id] = (start, end)
        mark_text[mark.id] = text
        note(mark, "highlight", target=doc_id)

    # annotations from the remaining stickies
    annotations: list[Annotation] = []
    for sticky in stickies:
        if sticky.id in element_to_doc:
            continue  # became a document
        text = sticky.text or ""
        parent = export.get(sticky.parent) if sticky.parent else None
        if parent is None:
            try:
                parent = _resolve_parent(
                    sticky,
                    [c for c in cards if c.id in element_to_doc],
                    frames)
            except AmbiguousParent:
                raise
        if parent is None:
            note(sticky, None, reason="floating note")
            continue
        if not text:
            note(sticky, None, reason="empty sticky")
            continue
        if parent.id in element_to_doc:
            target = element_to_doc[parent.id]
        elif parent.kind == "frame":
            target = parent.id
        else:
            note(sticky, None, reason=f"sticky attached to a {parent.kind}")
            continue
        annotations.append(Annotation(target=target, text=text))
        note(sticky, "annotation", target=target)

    # connections; also tally text-graph degrees for the marks
    connections: list[Connection] = []
    text_degree: dict[str, int] = {}

    def endpoint(connector: BoardElement, element_id: str | None, side: str) -> Ref:
        if not element_id:
            raise MalformedExport(f"{connector.id}: connector lacks a {side}")
        element = export.get(element_id)
        if element is None:
            raise MalformedExport(
                f"{connector.id}: {side} {element_id!r} does not exist")
        if element.id in element_to_doc:
            return Ref.doc(element_to_doc[element.id])
        if element.kind == "frame":
            return Ref.cluster(element.id)
        if element.kind == "mark" and element.id in mark_doc:
            return Ref.text(mark_text[element.id])
        raise MalformedExport(
            f"{connector.id}: {side} {element_id!r} maps to nothing connectable")

    for connector in connectors:
        source = endpoint(connector, connector.source, "source")
        target = endpoint(connector, connector.target, "target")
        if source == target:
            note(connector, None, reason="connector joins an object to itself")
            continue
        connections.append(Connection(source=source, target=target,
                                      label=connector.text or None))
        note(connector, "connection", target=None)
        if source.kind == "text" and target.kind == "text":
            for element_id in (connector.source, connector.target):
                if element_id in mark_doc:
                    text_degree[element_id] = text_degree.get(element_id, 0) + 1

    # one highlight per mark, plus degree-1 extras for text-graph members
    highlights: list[Highlight] = []
    for mark in marks:
        if mark.id not in mark_doc:
            continue
        copies = max(1, text_degree.get(mark.id, 0))
        start, end = mark_span[mark.id]
        for _ in range(copies):
            highlights.append(Highlight(
                doc_id=mark_doc[mark.id], start=start, end=end,
                text=mark_text[mark.id]))

    clusters = tuple(
        Cluster(id=frame.id, name=cluster_names[frame.id],
                members=tuple(cluster_members[frame.id]))
        for frame in frames)

    workspace = Workspace(
        documents=tuple(documents),
        relevant=frozenset(doc_ids),
        highlights=tuple(highlights),
        annotations=tuple(annotations),
        clusters=clusters,
        connections=tuple(connections),
    )
    report = MappingReport(entries=tuple(
        dispositions[e.id] for e in export.elements))
    return workspace, report


def export_board(ws: Workspace) -> list[dict[str, Any]]:
    """Inverse mapping: lay a workspace out as a board export. Text-token
    connection endpoints require a matching highlight to attach to."""
    elements: list[dict[str, Any]] = []
    for cluster in ws.clusters:
        entry: dict[str, Any] = {"id": cluster.id, "kind": "frame"}
        if cluster.name is not None:
            entry["title"] = cluster.name
        elements.append(entry)
    for doc in ws.documents:
        entry = {"id": doc.id, "kind": "card", "title": doc.id, "text": doc.body}
        owner = ws.cluster_of(doc.id)
        if owner is not None:
            entry["parent"] = owner.id
        elements.append(entry)

    # one mark per highlight act, so weights survive the round trip
    mark_ids_by_text: dict[str, str] = {}
    for i, h in enumerate(ws.highlights):
        mark_id = f"mark_{i}"
        elements.append({
            "id": mark_id, "kind": "mark", "parent": h.doc_id,
            "span": [h.start, h.end], "text": h.text,
        })
        mark_ids_by_text.setdefault(h.text, mark_id)

    for i, a in enumerate(ws.annotations):
        elements.append({
            "id": f"note_{i}", "kind": "sticky", "parent": a.target, "text": a.text,
        })

    def ref_element(ref: Ref) -> str:
        if ref.kind in ("doc", "cluster"):
            return ref.value
        mark_id = mark_ids_by_text.get(ref.value)
        if mark_id is None:
            raise ValueError(
                f"text endpoint {ref.value!r} has no matching highlight to attach to")
        return mark_id

    for i, c in enumerate(ws.connections):
        entry = {
            "id": f"link_{i}", "kind": "connector",
            "source": ref_element(c.source), "target": ref_element(c.target),
        }
        if c.label is not None:
            entry["text"] = c.label
        elements.append(entry)
    return elements
