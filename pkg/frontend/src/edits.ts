/**
 * Edit wire format plus the client-side mirror used for optimistic rendering.
 *
 * The server stays the single semantic authority: the mirror applies an edit
 * to a local snapshot so the canvas updates immediately, and the real answer
 * arrives with the POST acknowledgement. When the server rejects, the caller
 * throws the mirrored result away and re-renders from the acknowledged state.
 */

import type {
  AnnotationDict,
  ClusterDict,
  ConnectionDict,
  RefDict,
  WorkspaceDict,
} from "./types.js";

export type Edit =
  | { type: "add_document"; id: string; body: string; title?: string }
  | { type: "set_relevance"; doc_id: string; relevant: boolean }
  | { type: "add_highlight"; doc_id: string; start: number; end: number; text: string }
  | { type: "remove_highlight"; index: number }
  | { type: "add_annotation"; target: string; text: string }
  | { type: "remove_annotation"; index: number }
  | { type: "create_cluster"; cluster_id: string; name?: string; members?: string[] }
  | { type: "rename_cluster"; cluster_id: string; name?: string }
  | { type: "assign_to_cluster"; doc_id: string; cluster_id: string }
  | { type: "remove_from_cluster"; doc_id: string; cluster_id: string }
  | { type: "add_connection"; source: RefDict; target: RefDict; label?: string }
  | { type: "remove_connection"; index: number };

function cloneWorkspace(ws: WorkspaceDict): WorkspaceDict {
  // structuredClone exists on node 17+ and every evergreen browser.
  return structuredClone(ws);
}

function withoutIndex<T>(items: T[], index: number): T[] {
  if (index < 0 || index >= items.length) return items.slice();
  return items.slice(0, index).concat(items.slice(index + 1));
}

/**
 * Mechanically apply one edit to a snapshot, returning a new snapshot.
 *
 * Deliberately permissive: it never validates beyond what applying needs,
 * because any edit the server dislikes comes back as a 422 and the
 * optimistic state is reverted anyway. The one thing it must get right is
 * shape, so a pending queue can be replayed on top of an acknowledged
 * snapshot in order.
 */
export function applyEditLocally(ws: WorkspaceDict, edit: Edit): WorkspaceDict {
  const next = cloneWorkspace(ws);
  switch (edit.type) {
    case "add_document": {
      const doc: { id: string; body: string; title?: string } = {
        id: edit.id,
        body: edit.body,
      };
      if (edit.title !== undefined) doc.title = edit.title;
      next.documents.push(doc);
      return next;
    }
    case "set_relevance": {
      const has = next.relevant.includes(edit.doc_id);
      if (edit.relevant && !has) next.relevant.push(edit.doc_id);
      if (!edit.relevant && has) {
        next.relevant = next.relevant.filter((id) => id !== edit.doc_id);
      }
      next.relevant.sort();
      return next;
    }
    case "add_highlight": {
      next.highlights.push({
        doc_id: edit.doc_id,
        start: edit.start,
        end: edit.end,
        text: edit.text,
      });
      return next;
    }
    case "remove_highlight":
      next.highlights = withoutIndex(next.highlights, edit.index);
      return next;
    case "add_annotation":
      next.annotations.push({ target: edit.target, text: edit.text });
      return next;
    case "remove_annotation":
      next.annotations = withoutIndex(next.annotations, edit.index);
      return next;
    case "create_cluster": {
      const cluster: ClusterDict = {
        id: edit.cluster_id,
        members: (edit.members ?? []).slice(),
      };
      if (edit.name !== undefined) cluster.name = edit.name;
      next.clusters.push(cluster);
      return next;
    }
    case "rename_cluster": {
      for (const cluster of next.clusters) {
        if (cluster.id !== edit.cluster_id) continue;
        if (edit.name === undefined) delete cluster.name;
        else cluster.name = edit.name;
      }
      return next;
    }
    case "assign_to_cluster": {
      for (const cluster of next.clusters) {
        if (cluster.id === edit.cluster_id && !cluster.members.includes(edit.doc_id)) {
          cluster.members.push(edit.doc_id);
        }
      }
      return next;
    }
    case "remove_from_cluster": {
      for (const cluster of next.clusters) {
        if (cluster.id === edit.cluster_id) {
          cluster.members = cluster.members.filter((m) => m !== edit.doc_id);
        }
      }
      return next;
    }
    case "add_connection": {
      const conn: ConnectionDict = { source: edit.source, target: edit.target };
      if (edit.label !== undefined) conn.label = edit.label;
      next.connections.push(conn);
      return next;
    }
    case "remove_connection":
      next.connections = withoutIndex(next.connections, edit.index);
      return next;
  }
}

/** Which cluster holds this document right now, if any. */
export function clusterOf(ws: WorkspaceDict, docId: string): ClusterDict | null {
  for (const cluster of ws.clusters) {
    if (cluster.members.includes(docId)) return cluster;
  }
  return null;
}

export function getDocument(ws: WorkspaceDict, docId: string) {
  return ws.documents.find((d) => d.id === docId) ?? null;
}

/** Annotations attached to one target, in workspace order. */
export function annotationsOn(ws: WorkspaceDict, target: string): AnnotationDict[] {
  return ws.annotations.filter((a) => a.target === target);
}
