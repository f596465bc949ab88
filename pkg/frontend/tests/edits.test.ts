import { describe, expect, it } from "vitest";

import {
  annotationsOn,
  applyEditLocally,
  clusterOf,
  getDocument,
  type Edit,
} from "../src/edits.js";
import { tinyWorkspace } from "./fakes.js";

describe("applyEditLocally", () => {
  it("adds a document without touching the original snapshot", () => {
    const ws = tinyWorkspace();
    const next = applyEditLocally(ws, {
      type: "add_document", id: "D4", body: "iota kappa", title: "fourth",
    });
    expect(next.documents.map((d) => d.id)).toEqual(["D1", "D2", "D3", "D4"]);
    expect(next.documents[3]).toEqual({ id: "D4", body: "iota kappa", title: "fourth" });
    expect(ws.documents).toHaveLength(3);
  });

  it("omits the title key when the edit has none", () => {
    const next = applyEditLocally(tinyWorkspace(), {
      type: "add_document", id: "D4", body: "iota",
    });
    expect("title" in next.documents[3]!).toBe(false);
  });

  it("toggles relevance and keeps the set sorted", () => {
    const ws = tinyWorkspace();
    const on = applyEditLocally(ws, { type: "set_relevance", doc_id: "D3", relevant: true });
    expect(on.relevant).toEqual(["D1", "D2", "D3"]);
    const off = applyEditLocally(on, { type: "set_relevance", doc_id: "D1", relevant: false });
    expect(off.relevant).toEqual(["D2", "D3"]);
  });

  it("relevance toggles are idempotent", () => {
    const ws = tinyWorkspace();
    const once = applyEditLocally(ws, { type: "set_relevance", doc_id: "D1", relevant: true });
    expect(once.relevant).toEqual(ws.relevant);
  });

  it("appends and removes highlights by index", () => {
    const ws = tinyWorkspace();
    const added = applyEditLocally(ws, {
      type: "add_highlight", doc_id: "D2", start: 0, end: 5, text: "delta",
    });
    expect(added.highlights).toHaveLength(2);
    const removed = applyEditLocally(added, { type: "remove_highlight", index: 0 });
    expect(removed.highlights).toEqual([
      { doc_id: "D2", start: 0, end: 5, text: "delta" },
    ]);
  });

  it("appends and removes annotations", () => {
    const ws = tinyWorkspace();
    const added = applyEditLocally(ws, {
      type: "add_annotation", target: "C1", text: "the whole group matters",
    });
    expect(annotationsOn(added, "C1")).toEqual([
      { target: "C1", text: "the whole group matters" },
    ]);
    const removed = applyEditLocally(added, { type: "remove_annotation", index: 1 });
    expect(removed.annotations).toEqual(ws.annotations);
  });

  it("creates, renames, and unmakes cluster names", () => {
    const ws = tinyWorkspace();
    const created = applyEditLocally(ws, {
      type: "create_cluster", cluster_id: "C3", name: "Fresh", members: [],
    });
    expect(created.clusters[2]).toEqual({ id: "C3", members: [], name: "Fresh" });
    const renamed = applyEditLocally(created, {
      type: "rename_cluster", cluster_id: "C3", name: "Renamed",
    });
    expect(renamed.clusters[2]!.name).toBe("Renamed");
    const cleared = applyEditLocally(renamed, {
      type: "rename_cluster", cluster_id: "C3",
    });
    expect("name" in cleared.clusters[2]!).toBe(false);
  });

  it("assigns to and removes from clusters", () => {
    const ws = tinyWorkspace();
    const out = applyEditLocally(ws, {
      type: "remove_from_cluster", doc_id: "D2", cluster_id: "C1",
    });
    expect(clusterOf(out, "D2")).toBeNull();
    const back = applyEditLocally(out, {
      type: "assign_to_cluster", doc_id: "D2", cluster_id: "C2",
    });
    expect(clusterOf(back, "D2")?.id).toBe("C2");
  });

  it("does not double-assign an existing member", () => {
    const ws = tinyWorkspace();
    const same = applyEditLocally(ws, {
      type: "assign_to_cluster", doc_id: "D1", cluster_id: "C1",
    });
    expect(same.clusters[0]!.members).toEqual(["D1", "D2"]);
  });

  it("appends and removes connections", () => {
    const ws = tinyWorkspace();
    const added = applyEditLocally(ws, {
      type: "add_connection",
      source: { text: "alpha" },
      target: { cluster: "C2" },
      label: "points at",
    });
    expect(added.connections[1]).toEqual({
      source: { text: "alpha" }, target: { cluster: "C2" }, label: "points at",
    });
    const removed = applyEditLocally(added, { type: "remove_connection", index: 1 });
    expect(removed.connections).toEqual(ws.connections);
  });

  it("replaying a queue on a snapshot reproduces the combined state", () => {
    const ws = tinyWorkspace();
    const queue: Edit[] = [
      { type: "add_document", id: "D4", body: "new evidence" },
      { type: "set_relevance", doc_id: "D4", relevant: true },
      { type: "assign_to_cluster", doc_id: "D4", cluster_id: "C2" },
      { type: "add_highlight", doc_id: "D4", start: 0, end: 3, text: "new" },
    ];
    const replayed = queue.reduce(applyEditLocally, ws);
    expect(getDocument(replayed, "D4")).not.toBeNull();
    expect(replayed.relevant).toContain("D4");
    expect(clusterOf(replayed, "D4")?.id).toBe("C2");
    expect(replayed.highlights.at(-1)).toEqual({
      doc_id: "D4", start: 0, end: 3, text: "new",
    });
  });
});

describe("lookups", () => {
  it("clusterOf finds the owning cluster", () => {
    const ws = tinyWorkspace();
    expect(clusterOf(ws, "D1")?.id).toBe("C1");
    expect(clusterOf(ws, "D3")?.id).toBe("C2");
  });

  it("getDocument returns null for unknown ids", () => {
    expect(getDocument(tinyWorkspace(), "nope")).toBeNull();
  });
});
