/**
 * Wire types for the spacesteer HTTP API.
 *
 * These mirror the server's JSON shapes exactly; nothing here is invented
 * client-side. Geometry types live in canvas.ts because the server never
 * sees them.
 */

export interface DocumentDict {
  id: string;
  body: string;
  title?: string;
}

export interface HighlightDict {
  doc_id: string;
  start: number;
  end: number;
  text: string;
}

export interface AnnotationDict {
  target: string;
  text: string;
}

export interface ClusterDict {
  id: string;
  members: string[];
  name?: string;
}

/** Connection endpoint: exactly one of doc / cluster / text is set. */
export interface RefDict {
  doc?: string;
  cluster?: string;
  text?: string;
}

export interface ConnectionDict {
  source: RefDict;
  target: RefDict;
  label?: string;
}

export interface WorkspaceDict {
  version: number;
  documents: DocumentDict[];
  relevant: string[];
  highlights: HighlightDict[];
  annotations: AnnotationDict[];
  clusters: ClusterDict[];
  connections: ConnectionDict[];
}

export interface ConditionDict {
  name: string;
  filtering: boolean;
  clustering: boolean;
  cluster_names: boolean;
  highlights: boolean;
  annotations: boolean;
  connections: boolean;
}

export interface Violation {
  entity: string;
  rule: string;
  message: string;
}

export interface EditResult {
  applied: boolean;
  sequence: number;
  violations: Violation[];
}

export interface MessageDict {
  role: "system" | "assistant" | "user";
  content: string;
}

export interface ManifestDict {
  documents: "all" | "relevant" | "structure";
  cluster_names: boolean;
  annotations: boolean;
  highlights: boolean;
  connections: boolean;
}

/** GET /workspaces/{id}/prompt response: the bundle plus server bookkeeping. */
export interface PromptResponse {
  condition: string;
  sequence: number;
  digest: string;
  manifest: ManifestDict;
  messages: MessageDict[];
}

export interface BreakdownDict {
  scores: Record<string, number>;
  total: number;
  percentage: number;
  by_category: Record<string, number>;
  by_category_points: Record<string, number>;
  rubric_total: number;
}

/**
 * The fields of a run record the UI consumes. The server sends more
 * bookkeeping (timings, raw judge transcripts, the compiled messages);
 * extra keys are simply ignored here.
 */
export interface RunRecordDict {
  id: string;
  plan: string;
  condition: string;
  replication: number;
  temperature: number;
  status: "ok" | "failed";
  prompt_digest: string;
  output: string;
  breakdown: BreakdownDict | null;
  error: string;
  regrade_of: string | null;
  model: string;
  provider: string;
  attempts: number;
}

export interface WorkspaceSummary {
  id: string;
  sequence: number;
}

export interface WorkspaceResponse {
  id: string;
  sequence: number;
  workspace: WorkspaceDict;
  violations: Violation[];
}

export interface HealthResponse {
  status: string;
  provider: string;
  workspaces: string[];
}

export interface BaselineResponse {
  average: number;
  minimum: number;
  maximum: number;
  participants: number;
  rubric_total: number;
  average_pct: number;
  minimum_pct: number;
  maximum_pct: number;
}

export interface StatsRow {
  condition: string;
  n: number;
  mean: number;
  median: number;
  q1: number;
  q3: number;
  min: number;
  max: number;
  Who: number;
  What: number;
  When: number;
  Where: number;
  Other: number;
  n_failed: number;
}
