/**
 * Session store: the single ViewState behind the canvas, the prompt panel,
 * and the score panel.
 *
 * Two snapshots live here. `workspace` is the last state the server
 * acknowledged, stamped with its sequence number. `optimistic` is that
 * snapshot with the pending queue replayed on top, and is what the canvas
 * renders. Edits flush strictly in order, one request in flight at a time;
 * a rejection drops the offending edit and rebuilds the optimistic view,
 * which is exactly a revert when nothing else is queued.
 */

import { ApiClient, ApiError } from "./api.js";
import { applyEditLocally, type Edit } from "./edits.js";
import {
  initialLayout,
  planDrag,
  type CanvasLayout,
  type Point,
  type Rect,
} from "./canvas.js";
import { runPanel, type RunPanel } from "./scoreboard.js";
import type {
  BaselineResponse,
  ConditionDict,
  PromptResponse,
  Violation,
  WorkspaceDict,
} from "./types.js";

export interface PendingEdit {
  edit: Edit;
  state: "queued" | "in-flight";
}

export type EditOutcome =
  | { status: "applied"; sequence: number }
  | { status: "rejected"; violations: Violation[] }
  /** Network trouble: the edit stays queued and visible as pending. */
  | { status: "held" };

export interface ViewState {
  workspaceId: string;
  sequence: number;
  workspace: WorkspaceDict;
  optimistic: WorkspaceDict;
  condition: string;
  preview: PromptResponse | null;
  lastRun: RunPanel | null;
  pending: readonly PendingEdit[];
  violations: Violation[];
  offline: boolean;
}

type Listener = (state: ViewState) => void;

const EMPTY_WORKSPACE: WorkspaceDict = {
  version: 1,
  documents: [],
  relevant: [],
  highlights: [],
  annotations: [],
  clusters: [],
  connections: [],
};

export class SessionStore {
  readonly api: ApiClient;
  readonly workspaceId: string;

  /** Re-fetch the preview on its own when edits make it stale. */
  autoRefreshPreview = true;

  private sequence = 0;
  private workspace: WorkspaceDict = EMPTY_WORKSPACE;
  private optimistic: WorkspaceDict = EMPTY_WORKSPACE;
  private condition = "E1";
  private preview: PromptResponse | null = null;
  private lastRun: RunPanel | null = null;
  private pending: PendingEdit[] = [];
  private violations: Violation[] = [];
  private offline = false;

  private baseline: BaselineResponse | null = null;
  private conditionList: ConditionDict[] = [];
  private layout: CanvasLayout = { cards: new Map(), frames: new Map() };
  private listeners: Listener[] = [];
  private flushing: Promise<void> | null = null;
  private flushRequested = false;

  constructor(api: ApiClient, workspaceId: string) {
    this.api = api;
    this.workspaceId = workspaceId;
  }

  // -- state access ----------------------------------------------------------

  get state(): ViewState {
    return {
      workspaceId: this.workspaceId,
      sequence: this.sequence,
      workspace: this.workspace,
      optimistic: this.optimistic,
      condition: this.condition,
      preview: this.preview,
      lastRun: this.lastRun,
      pending: this.pending,
      violations: this.violations,
      offline: this.offline,
    };
  }

  /** Client-only geometry; never serialized, never posted. */
  get canvasLayout(): CanvasLayout {
    return this.layout;
  }

  get conditions(): ConditionDict[] {
    return this.conditionList;
  }

  get humanBaseline(): BaselineResponse | null {
    return this.baseline;
  }

  onChange(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private notify(): void {
    const snapshot = this.state;
    for (const listener of this.listeners) listener(snapshot);
  }

  // -- loading ---------------------------------------------------------------

  async load(): Promise<void> {
    const [ws, conditions, baseline] = await Promise.all([
      this.api.getWorkspace(this.workspaceId),
      this.api.conditions(),
      this.api.baseline(),
    ]);
    this.sequence = ws.sequence;
    this.workspace = ws.workspace;
    this.optimistic = ws.workspace;
    this.conditionList = conditions;
    this.baseline = baseline;
    this.layout = initialLayout(ws.workspace);
    this.notify();
  }

  private async reloadWorkspace(): Promise<void> {
    const ws = await this.api.getWorkspace(this.workspaceId);
    this.sequence = ws.sequence;
    this.workspace = ws.workspace;
    this.rebuildOptimistic();
  }

  // -- edits -----------------------------------------------------------------

  /**
   * Queue one edit: render it optimistically right away, then reconcile
   * with the server acknowledgement. Resolves once this edit is applied,
   * rejected, or held back by a network failure.
   */
  submitEdit(edit: Edit): Promise<EditOutcome> {
    const entry: PendingEdit & { settle?: (o: EditOutcome) => void } = {
      edit,
      state: "queued",
    };
    const outcome = new Promise<EditOutcome>((resolve) => {
      entry.settle = resolve;
    });
    this.pending.push(entry);
    this.optimistic = applyEditLocally(this.optimistic, edit);
    this.notify();
    void this.flush();
    return outcome;
  }

  /** Try the queue again after a network failure. */
  retryFlush(): Promise<void> {
    this.offline = false;
    return this.flush();
  }

  /**
   * Request a flush pass. Settling an edit's outcome hands control to user
   * code before the current pass has fully wound down, so a bare "is one
   * running" check would swallow requests made from those continuations
   * (dragCardTo submits its second edit exactly there). The requested flag
   * makes the runner loop until every request has had a full pass.
   */
  private flush(): Promise<void> {
    this.flushRequested = true;
    if (this.flushing === null) {
      this.flushing = this.runFlushes().finally(() => {
        this.flushing = null;
      });
    }
    return this.flushing;
  }

  private async runFlushes(): Promise<void> {
    while (this.flushRequested) {
      this.flushRequested = false;
      await this.flushQueue();
    }
  }

  private async flushQueue(): Promise<void> {
    while (this.pending.length > 0 && !this.offline) {
      const entry = this.pending[0] as PendingEdit & {
        settle?: (o: EditOutcome) => void;
      };
      entry.state = "in-flight";
      this.notify();

      let result;
      try {
        result = await this.api.postEdit(this.workspaceId, entry.edit);
      } catch (err) {
        if (err instanceof ApiError) {
          // Not an edit rejection (those are 422s postEdit unwraps): an
          // unknown workspace or a server bug. Drop the edit and surface it.
          this.pending.shift();
          const violation: Violation = {
            entity: this.workspaceId,
            rule: `Http${err.status}`,
            message: err.message,
          };
          this.violations = [violation];
          this.rebuildOptimistic();
          this.notify();
          entry.settle?.({ status: "rejected", violations: [violation] });
          continue;
        }
        entry.state = "queued";
        this.offline = true;
        this.notify();
        entry.settle?.({ status: "held" });
        entry.settle = undefined;
        return;
      }

      this.pending.shift();
      if (result.applied) {
        this.sequence = result.sequence;
        this.workspace = applyEditLocally(this.workspace, entry.edit);
        this.violations = [];
        entry.settle?.({ status: "applied", sequence: result.sequence });
      } else {
        this.violations = result.violations;
        entry.settle?.({ status: "rejected", violations: result.violations });
      }
      this.rebuildOptimistic();
      this.notify();
    }

    if (
      this.autoRefreshPreview &&
      this.preview !== null &&
      this.preview.sequence !== this.sequence &&
      this.pending.length === 0 &&
      !this.offline
    ) {
      try {
        await this.refreshPreview();
      } catch {
        // Transient fetch trouble; the stale preview stays visible and the
        // next edit or manual refresh tries again.
      }
    }
  }

  private rebuildOptimistic(): void {
    this.optimistic = this.pending.reduce(
      (ws, entry) => applyEditLocally(ws, entry.edit),
      this.workspace,
    );
  }

  // -- canvas gestures -------------------------------------------------------

  /** Pure layout change; by construction sends nothing to the server. */
  moveCard(docId: string, rect: Rect): void {
    this.layout.cards.set(docId, rect);
    this.notify();
  }

  /**
   * Drop a card at a point. The geometry always updates; semantic edits go
   * out only when the drop crossed a cluster boundary.
   */
  async dragCardTo(docId: string, to: Point): Promise<EditOutcome[]> {
    const plan = planDrag(this.optimistic, this.layout, docId, to);
    this.layout.cards.set(docId, plan.rect);
    this.notify();
    const outcomes: EditOutcome[] = [];
    for (const edit of plan.edits) {
      outcomes.push(await this.submitEdit(edit));
    }
    return outcomes;
  }

  // -- prompt preview --------------------------------------------------------

  /**
   * Fetch the compiled prompt for a condition. When the response's sequence
   * trails what we already acknowledged, the read was stale: refetch. When
   * it is ahead, the server saw edits we missed: adopt its workspace first.
   */
  async refreshPreview(condition: string = this.condition): Promise<PromptResponse> {
    this.condition = condition;
    let response = await this.api.getPrompt(this.workspaceId, condition);
    for (let retry = 0; retry < 3 && response.sequence !== this.sequence; retry++) {
      if (response.sequence > this.sequence) {
        await this.reloadWorkspace();
        break;
      }
      response = await this.api.getPrompt(this.workspaceId, condition);
    }
    this.preview = response;
    this.notify();
    return response;
  }

  // -- runs ------------------------------------------------------------------

  /**
   * Run summarize-and-grade once and shape the result for the score panel.
   * Provider failures come back as failed records or a 502; both render as
   * a failure card with a retry affordance.
   */
  async runAndDisplay(
    condition: string = this.condition,
    temperature?: number,
  ): Promise<RunPanel> {
    const baseline = this.baseline ?? (await this.api.baseline());
    this.baseline = baseline;
    let panel: RunPanel;
    try {
      const record = await this.api.postRun(this.workspaceId, condition, temperature);
      panel = runPanel(record, baseline);
    } catch (err) {
      if (!(err instanceof ApiError) || !err.isProviderError) throw err;
      panel = {
        kind: "failure",
        condition,
        error: String(err.detail ?? err.message),
        promptDigest: this.preview?.digest ?? "",
        canRetry: true,
      };
    }
    this.lastRun = panel;
    this.notify();
    return panel;
  }
}
