import { describe, expect, it } from "vitest";

import {
  clusterByName,
  contains,
  frameAt,
  highlightChips,
  highlightFirst,
  initialLayout,
  planDrag,
  selectionToHighlight,
  type Point,
  type Rect,
} from "../src/canvas.js";
import { applyEditLocally } from "../src/edits.js";
import { tinyWorkspace } from "./fakes.js";

function center(rect: Rect): Point {
  return { x: rect.x + rect.width / 2, y: rect.y + rect.height / 2 };
}

describe("contains", () => {
  const rect: Rect = { x: 0, y: 0, width: 10, height: 10 };

  it("includes the top-left edge and excludes the bottom-right", () => {
    expect(contains(rect, { x: 0, y: 0 })).toBe(true);
    expect(contains(rect, { x: 9.9, y: 9.9 })).toBe(true);
    expect(contains(rect, { x: 10, y: 5 })).toBe(false);
    expect(contains(rect, { x: 5, y: 10 })).toBe(false);
    expect(contains(rect, { x: -1, y: 5 })).toBe(false);
  });
});

describe("initialLayout", () => {
  it("places every member card inside its cluster frame", () => {
    const ws = tinyWorkspace();
    const layout = initialLayout(ws);
    for (const cluster of ws.clusters) {
      const frame = layout.frames.get(cluster.id)!;
      for (const member of cluster.members) {
        const card = layout.cards.get(member)!;
        expect(contains(frame, center(card))).toBe(true);
      }
    }
  });

  it("lays frames out side by side without overlap", () => {
    const layout = initialLayout(tinyWorkspace());
    const c1 = layout.frames.get("C1")!;
    const c2 = layout.frames.get("C2")!;
    expect(c1.x + c1.width).toBeLessThanOrEqual(c2.x);
  });

  it("parks unclustered documents below the frames", () => {
    const ws = applyEditLocally(tinyWorkspace(), {
      type: "add_document", id: "D4", body: "loose evidence",
    });
    const layout = initialLayout(ws);
    const card = layout.cards.get("D4")!;
    expect(frameAt(layout, center(card))).toBeNull();
    for (const frame of layout.frames.values()) {
      expect(card.y).toBeGreaterThanOrEqual(frame.y + frame.height);
    }
  });
});

describe("frameAt", () => {
  it("maps points to the frame that contains them", () => {
    const layout = initialLayout(tinyWorkspace());
    expect(frameAt(layout, center(layout.frames.get("C1")!))).toBe("C1");
    expect(frameAt(layout, center(layout.frames.get("C2")!))).toBe("C2");
    expect(frameAt(layout, { x: 100, y: 5000 })).toBeNull();
  });
});

describe("planDrag", () => {
  // The drop point is the card's new top-left; the card center decides the
  // target frame. dropInside() picks a top-left that lands the center in the
  // given frame.
  function dropInside(rect: Rect): Point {
    const c = center(rect);
    return { x: c.x - 80, y: c.y - 45 };
  }
  const openCanvas: Point = { x: 16, y: 5000 };

  it("produces zero edits for a move inside the current frame", () => {
    const ws = tinyWorkspace();
    const layout = initialLayout(ws);
    const frame = layout.frames.get("C1")!;
    const to = { x: frame.x + 8, y: frame.y + 8 };
    const plan = planDrag(ws, layout, "D1", to);
    expect(plan.edits).toEqual([]);
    expect(plan.rect).toMatchObject(to);
  });

  it("removes from the cluster when dropped on open canvas", () => {
    const ws = tinyWorkspace();
    const plan = planDrag(ws, initialLayout(ws), "D1", openCanvas);
    expect(plan.edits).toEqual([
      { type: "remove_from_cluster", doc_id: "D1", cluster_id: "C1" },
    ]);
  });

  it("assigns an unclustered card dropped into a frame", () => {
    const ws = applyEditLocally(tinyWorkspace(), {
      type: "add_document", id: "D4", body: "loose evidence",
    });
    const layout = initialLayout(ws);
    const plan = planDrag(ws, layout, "D4", dropInside(layout.frames.get("C2")!));
    expect(plan.edits).toEqual([
      { type: "assign_to_cluster", doc_id: "D4", cluster_id: "C2" },
    ]);
  });

  it("emits remove-then-assign for a cross-frame move", () => {
    const ws = tinyWorkspace();
    const layout = initialLayout(ws);
    const plan = planDrag(ws, layout, "D1", dropInside(layout.frames.get("C2")!));
    expect(plan.edits).toEqual([
      { type: "remove_from_cluster", doc_id: "D1", cluster_id: "C1" },
      { type: "assign_to_cluster", doc_id: "D1", cluster_id: "C2" },
    ]);
  });

  it("reads membership from the workspace, not from card pixels", () => {
    const ws = tinyWorkspace();
    const layout = initialLayout(ws);
    // Park D1's card far outside its frame; semantically it is still in C1.
    layout.cards.set("D1", { x: 900, y: 900, width: 160, height: 90 });
    const plan = planDrag(ws, layout, "D1", dropInside(layout.frames.get("C1")!));
    expect(plan.edits).toEqual([]);
  });
});

describe("clusterByName", () => {
  it("finds clusters by display name", () => {
    expect(clusterByName(tinyWorkspace(), "Group One")?.id).toBe("C1");
  });

  it("returns null for unknown or unnamed clusters", () => {
    expect(clusterByName(tinyWorkspace(), "NYSE")).toBeNull();
    expect(clusterByName(tinyWorkspace(), "C2")).toBeNull();
  });
});

describe("selectionToHighlight", () => {
  // D1 body: "alpha beta gamma" (16 chars)
  it("builds a span with text read back from the body", () => {
    expect(selectionToHighlight(tinyWorkspace(), "D1", 6, 10)).toEqual({
      type: "add_highlight", doc_id: "D1", start: 6, end: 10, text: "beta",
    });
  });

  it("normalizes a backwards selection", () => {
    expect(selectionToHighlight(tinyWorkspace(), "D1", 10, 6)).toEqual(
      selectionToHighlight(tinyWorkspace(), "D1", 6, 10),
    );
  });

  it("clamps offsets to the body", () => {
    expect(selectionToHighlight(tinyWorkspace(), "D1", 6, 99)).toMatchObject({
      start: 6, end: 16, text: "beta gamma",
    });
    expect(selectionToHighlight(tinyWorkspace(), "D1", -5, 5)).toMatchObject({
      start: 0, end: 5, text: "alpha",
    });
  });

  it("rejects empty selections and unknown documents", () => {
    expect(selectionToHighlight(tinyWorkspace(), "D1", 3, 3)).toBeNull();
    expect(selectionToHighlight(tinyWorkspace(), "nope", 0, 3)).toBeNull();
  });
});

describe("highlightFirst", () => {
  it("selects the first occurrence of the text", () => {
    expect(highlightFirst(tinyWorkspace(), "D1", "beta")).toEqual({
      type: "add_highlight", doc_id: "D1", start: 6, end: 10, text: "beta",
    });
  });

  it("returns null when the text is absent", () => {
    expect(highlightFirst(tinyWorkspace(), "D1", "omega")).toBeNull();
    expect(highlightFirst(tinyWorkspace(), "nope", "alpha")).toBeNull();
  });
});

describe("highlightChips", () => {
  it("stacks identical spans into one weighted chip", () => {
    let ws = tinyWorkspace();
    const again = highlightFirst(ws, "D1", "alpha")!;
    ws = applyEditLocally(ws, again);
    const chips = highlightChips(ws, "D1");
    expect(chips).toEqual([
      { doc_id: "D1", start: 0, end: 5, text: "alpha", weight: 2 },
    ]);
  });

  it("keeps distinct spans as separate chips", () => {
    let ws = tinyWorkspace();
    ws = applyEditLocally(ws, highlightFirst(ws, "D1", "beta")!);
    const chips = highlightChips(ws, "D1");
    expect(chips).toHaveLength(2);
    expect(chips.map((c) => c.weight)).toEqual([1, 1]);
  });

  it("filters by document when asked", () => {
    expect(highlightChips(tinyWorkspace(), "D2")).toEqual([]);
    expect(highlightChips(tinyWorkspace())).toHaveLength(1);
  });
});
