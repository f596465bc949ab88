import { describe, expect, it } from "vitest";

import { ApiClient, type FetchLike } from "../src/api.js";
import { clusterOf, type Edit } from "../src/edits.js";
import { SessionStore } from "../src/state.js";
import type { ScorePanel } from "../src/scoreboard.js";
import { BASELINE, FakeServer, makeRecord } from "./fakes.js";

function storeOn(fake: FakeServer, id = "tiny"): SessionStore {
  return new SessionStore(new ApiClient("http://fake", fake.fetch), id);
}

function editPosts(fake: FakeServer) {
  return fake.calls.filter(
    (c) => c.method === "POST" && c.path === "/workspaces/tiny/edits",
  );
}

const ADD_D4: Edit = { type: "add_document", id: "D4", body: "fresh evidence" };
const ADD_D5: Edit = { type: "add_document", id: "D5", body: "more evidence" };

describe("load", () => {
  it("adopts the server snapshot, conditions, and baseline", async () => {
    const fake = new FakeServer();
    const store = storeOn(fake);
    await store.load();
    expect(store.state.sequence).toBe(0);
    expect(store.state.workspace.documents).toHaveLength(3);
    expect(store.state.optimistic).toEqual(store.state.workspace);
    expect(store.conditions.map((c) => c.name)).toEqual(["E1", "E3", "E6", "E11"]);
    expect(store.humanBaseline).toEqual(BASELINE);
    expect([...store.canvasLayout.frames.keys()]).toEqual(["C1", "C2"]);
    expect(store.canvasLayout.cards.size).toBe(3);
  });
});

describe("submitEdit", () => {
  it("renders optimistically before the server acknowledges", async () => {
    const fake = new FakeServer();
    const store = storeOn(fake);
    await store.load();
    const outcome = store.submitEdit(ADD_D4);
    // Synchronously after the call: optimistic has the doc, acknowledged does not.
    expect(store.state.optimistic.documents).toHaveLength(4);
    expect(store.state.workspace.documents).toHaveLength(3);
    expect(store.state.pending).toHaveLength(1);
    expect(await outcome).toEqual({ status: "applied", sequence: 1 });
    expect(store.state.workspace.documents).toHaveLength(4);
    expect(store.state.pending).toHaveLength(0);
    expect(store.state.sequence).toBe(1);
  });

  it("keeps the displayed state on the acknowledged sequence", async () => {
    const fake = new FakeServer();
    const store = storeOn(fake);
    await store.load();
    await store.submitEdit(ADD_D4);
    // What the canvas renders corresponds exactly to the sequence the server
    // acknowledged: replaying nothing on top of it changes nothing.
    expect(store.state.optimistic).toEqual(store.state.workspace);
    expect(store.state.sequence).toBe(fake.sequence);
  });

  it("flushes strictly in order, one request in flight at a time", async () => {
    const fake = new FakeServer();
    const store = storeOn(fake);
    await store.load();
    const outcomes = await Promise.all([
      store.submitEdit(ADD_D4),
      store.submitEdit(ADD_D5),
      store.submitEdit({ type: "set_relevance", doc_id: "D4", relevant: true }),
    ]);
    expect(outcomes.map((o) => o.status)).toEqual(["applied", "applied", "applied"]);
    expect(outcomes).toEqual([
      { status: "applied", sequence: 1 },
      { status: "applied", sequence: 2 },
      { status: "applied", sequence: 3 },
    ]);
    const posts = editPosts(fake);
    expect(posts.map((p) => (p.body as Edit).type)).toEqual([
      "add_document", "add_document", "set_relevance",
    ]);
    expect(store.state.workspace.relevant).toContain("D4");
  });

  it("reverts the optimistic state when the server rejects", async () => {
    const fake = new FakeServer();
    const store = storeOn(fake);
    await store.load();
    const violation = { entity: "D9", rule: "UnknownDocument", message: "no doc D9" };
    fake.rejectNextEdit = [violation];
    const before = store.state.workspace;
    const outcome = await store.submitEdit({
      type: "set_relevance", doc_id: "D9", relevant: true,
    });
    expect(outcome).toEqual({ status: "rejected", violations: [violation] });
    expect(store.state.optimistic).toEqual(before);
    expect(store.state.violations).toEqual([violation]);
    expect(store.state.sequence).toBe(0);
    expect(store.state.pending).toHaveLength(0);
  });

  it("clears surfaced violations once a later edit lands", async () => {
    const fake = new FakeServer();
    const store = storeOn(fake);
    await store.load();
    fake.rejectNextEdit = [{ entity: "D9", rule: "UnknownDocument", message: "nope" }];
    await store.submitEdit({ type: "set_relevance", doc_id: "D9", relevant: true });
    expect(store.state.violations).toHaveLength(1);
    await store.submitEdit(ADD_D4);
    expect(store.state.violations).toEqual([]);
  });

  it("holds the edit visibly when the network fails, then retries", async () => {
    const fake = new FakeServer();
    const store = storeOn(fake);
    await store.load();
    fake.networkFailures = 1;
    const outcome = await store.submitEdit(ADD_D4);
    expect(outcome).toEqual({ status: "held" });
    expect(store.state.offline).toBe(true);
    expect(store.state.pending).toHaveLength(1);
    expect(store.state.pending[0]!.state).toBe("queued");
    // Still rendered optimistically while held.
    expect(store.state.optimistic.documents).toHaveLength(4);
    expect(store.state.workspace.documents).toHaveLength(3);

    await store.retryFlush();
    expect(store.state.offline).toBe(false);
    expect(store.state.pending).toHaveLength(0);
    expect(store.state.workspace.documents).toHaveLength(4);
    expect(store.state.sequence).toBe(1);
  });

  it("queues edits submitted while offline and drains them in order", async () => {
    const fake = new FakeServer();
    const store = storeOn(fake);
    await store.load();
    fake.networkFailures = 1;
    expect(await store.submitEdit(ADD_D4)).toEqual({ status: "held" });
    const second = store.submitEdit(ADD_D5);
    expect(store.state.pending).toHaveLength(2);
    expect(editPosts(fake)).toHaveLength(1); // only the failed attempt so far

    await store.retryFlush();
    expect(await second).toEqual({ status: "applied", sequence: 2 });
    expect(editPosts(fake).map((p) => (p.body as Edit & { id?: string }).id)).toEqual([
      "D4", "D4", "D5",
    ]);
    expect(store.state.workspace.documents.map((d) => d.id)).toEqual([
      "D1", "D2", "D3", "D4", "D5",
    ]);
  });

  it("drops the edit and surfaces a synthetic violation on other API errors", async () => {
    const fake = new FakeServer();
    const store = storeOn(fake, "ghost");
    const outcome = await store.submitEdit(ADD_D4);
    expect(outcome.status).toBe("rejected");
    if (outcome.status !== "rejected") throw new Error("unreachable");
    expect(outcome.violations[0]).toMatchObject({ entity: "ghost", rule: "Http404" });
    expect(store.state.pending).toHaveLength(0);
    expect(store.state.offline).toBe(false);
    // The queue is not wedged: a later edit still settles.
    const again = await store.submitEdit(ADD_D5);
    expect(again.status).toBe("rejected");
  });
});

describe("preview reconciliation", () => {
  it("re-fetches a preview stamped behind the acknowledged sequence", async () => {
    const fake = new FakeServer();
    const store = storeOn(fake);
    await store.load();
    await store.submitEdit(ADD_D4); // sequence 1
    fake.promptLagOnce = true;
    fake.calls.length = 0;
    const preview = await store.refreshPreview("E1");
    expect(preview.sequence).toBe(1);
    expect(store.state.preview?.digest).toBe(preview.digest);
    const promptGets = fake.calls.filter((c) =>
      c.path.startsWith("/workspaces/tiny/prompt"),
    );
    expect(promptGets).toHaveLength(2);
  });

  it("adopts the server workspace when the preview is ahead of us", async () => {
    const fake = new FakeServer();
    const store = storeOn(fake);
    await store.load();
    // Another client edits behind our back.
    fake.workspace = { ...fake.workspace, relevant: ["D1", "D2", "D3"] };
    fake.sequence = 1;
    const preview = await store.refreshPreview("E1");
    expect(preview.sequence).toBe(1);
    expect(store.state.sequence).toBe(1);
    expect(store.state.workspace.relevant).toEqual(["D1", "D2", "D3"]);
  });

  it("auto-refreshes a stale preview after edits drain", async () => {
    const fake = new FakeServer();
    const store = storeOn(fake);
    await store.load();
    const before = await store.refreshPreview("E3");
    expect(before.sequence).toBe(0);
    await store.submitEdit({
      type: "add_highlight", doc_id: "D2", start: 0, end: 5, text: "delta",
    });
    await store.retryFlush(); // join the tail of the flush
    expect(store.state.preview?.sequence).toBe(1);
    expect(store.state.preview?.digest).not.toBe(before.digest);
    expect(store.state.condition).toBe("E3");
  });

  it("leaves the preview alone when auto-refresh is off", async () => {
    const fake = new FakeServer();
    const store = storeOn(fake);
    store.autoRefreshPreview = false;
    await store.load();
    const before = await store.refreshPreview("E3");
    await store.submitEdit(ADD_D4);
    await store.retryFlush();
    expect(store.state.preview).toBe(before);
  });
});

describe("canvas gestures", () => {
  it("moveCard is pure geometry and talks to no one", async () => {
    const fake = new FakeServer();
    const store = storeOn(fake);
    await store.load();
    const callsBefore = fake.calls.length;
    store.moveCard("D1", { x: 5, y: 5, width: 160, height: 90 });
    expect(fake.calls).toHaveLength(callsBefore);
    expect(store.canvasLayout.cards.get("D1")).toMatchObject({ x: 5, y: 5 });
  });

  it("a drop inside the current frame produces zero edits", async () => {
    const fake = new FakeServer();
    const store = storeOn(fake);
    await store.load();
    const frame = store.canvasLayout.frames.get("C1")!;
    const outcomes = await store.dragCardTo("D1", { x: frame.x + 8, y: frame.y + 8 });
    expect(outcomes).toEqual([]);
    expect(editPosts(fake)).toHaveLength(0);
    expect(store.state.sequence).toBe(0);
    expect(store.canvasLayout.cards.get("D1")).toMatchObject({
      x: frame.x + 8, y: frame.y + 8,
    });
  });

  it("a cross-frame drop posts remove-then-assign and re-homes the doc", async () => {
    const fake = new FakeServer();
    const store = storeOn(fake);
    await store.load();
    const frame = store.canvasLayout.frames.get("C2")!;
    const to = {
      x: frame.x + frame.width / 2 - 80,
      y: frame.y + frame.height / 2 - 45,
    };
    const outcomes = await store.dragCardTo("D1", to);
    expect(outcomes).toEqual([
      { status: "applied", sequence: 1 },
      { status: "applied", sequence: 2 },
    ]);
    expect(editPosts(fake).map((p) => (p.body as Edit).type)).toEqual([
      "remove_from_cluster", "assign_to_cluster",
    ]);
    expect(clusterOf(store.state.workspace, "D1")?.id).toBe("C2");
  });
});

describe("runAndDisplay", () => {
  it("shapes a mock run into the score panel and stores it", async () => {
    const fake = new FakeServer();
    const store = storeOn(fake);
    await store.load();
    const panel = await store.runAndDisplay("E1", 0.4);
    expect(panel.kind).toBe("score");
    const score = panel as ScorePanel;
    expect(score.mock).toBe(true);
    expect(score.temperature).toBe(0.4);
    expect(score.percentage).toBe(69.7);
    expect(store.state.lastRun).toBe(panel);
    const post = fake.calls.find((c) => c.path === "/workspaces/tiny/runs");
    expect(post?.body).toEqual({ condition: "E1", temperature: 0.4 });
  });

  it("renders a failed record as a retryable failure", async () => {
    const fake = new FakeServer();
    const store = storeOn(fake);
    await store.load();
    fake.failNextRun = true;
    const panel = await store.runAndDisplay("E1");
    expect(panel).toMatchObject({
      kind: "failure",
      condition: "E1",
      error: "ProviderError: scripted failure",
      canRetry: true,
    });
  });

  it("renders a 502 as a failure panel instead of throwing", async () => {
    const fetch502: FetchLike = async (input) => {
      if (input.endsWith("/baseline")) {
        return { status: 200, json: async () => BASELINE };
      }
      return {
        status: 502,
        json: async () => ({ error: "GatewayError", message: "upstream exploded" }),
      };
    };
    const store = new SessionStore(new ApiClient("http://fake", fetch502), "tiny");
    const panel = await store.runAndDisplay("E3");
    expect(panel.kind).toBe("failure");
    if (panel.kind !== "failure") throw new Error("unreachable");
    expect(panel.condition).toBe("E3");
    expect(panel.canRetry).toBe(true);
    expect(store.state.lastRun).toBe(panel);
  });

  it("propagates non-provider errors", async () => {
    const fake = new FakeServer();
    const store = storeOn(fake, "ghost");
    await expect(store.runAndDisplay("E1")).rejects.toMatchObject({ status: 404 });
  });

  it("uses the store condition by default", async () => {
    const fake = new FakeServer();
    const store = storeOn(fake);
    await store.load();
    await store.refreshPreview("E11");
    const panel = (await store.runAndDisplay()) as ScorePanel;
    expect(panel.condition).toBe("E11");
  });
});

describe("notifications", () => {
  it("notifies listeners on every visible transition and supports unsubscribe", async () => {
    const fake = new FakeServer();
    const store = storeOn(fake);
    const seen: string[] = [];
    const off = store.onChange((s) =>
      seen.push(`${s.pending.length}:${s.sequence}`),
    );
    await store.load();
    await store.submitEdit(ADD_D4);
    // load, queue (1:0), in-flight (1:0), applied (0:1)
    expect(seen[0]).toBe("0:0");
    expect(seen).toContain("1:0");
    expect(seen.at(-1)).toBe("0:1");
    off();
    const n = seen.length;
    store.moveCard("D1", { x: 1, y: 1, width: 160, height: 90 });
    expect(seen).toHaveLength(n);
  });
});
