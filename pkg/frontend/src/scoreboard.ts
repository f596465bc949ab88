/**
 * Score panel model: the report, the percentage, per-category bars, and
 * where the run lands against the human baseline markers.
 */

import type { BaselineResponse, RunRecordDict } from "./types.js";

export const CATEGORIES = ["Who", "What", "When", "Where", "Other"] as const;
export type Category = (typeof CATEGORIES)[number];

export interface CategoryBar {
  category: Category;
  /** 0..100, share of this category's available points earned. */
  percent: number;
}

export interface BaselineMarker {
  label: "human min" | "human median" | "human max";
  percent: number;
}

export interface ScorePanel {
  kind: "score";
  runId: string;
  condition: string;
  temperature: number;
  report: string;
  percentage: number;
  bars: CategoryBar[];
  markers: BaselineMarker[];
  /** True when the run beat the best human report. */
  aboveHumanMax: boolean;
  /** Offline deterministic provider; rendered as a "mock" badge. */
  mock: boolean;
}

export interface FailurePanel {
  kind: "failure";
  condition: string;
  error: string;
  /** Stored digest so the failed prompt can be pulled up for debugging. */
  promptDigest: string;
  canRetry: boolean;
}

export type RunPanel = ScorePanel | FailurePanel;

export function baselineMarkers(baseline: BaselineResponse): BaselineMarker[] {
  return [
    { label: "human min", percent: baseline.minimum_pct },
    { label: "human median", percent: baseline.average_pct },
    { label: "human max", percent: baseline.maximum_pct },
  ];
}

export function categoryBars(record: RunRecordDict): CategoryBar[] {
  const breakdown = record.breakdown;
  return CATEGORIES.map((category) => {
    const points = breakdown?.by_category_points[category] ?? 0;
    const earned = breakdown?.by_category[category] ?? 0;
    return {
      category,
      percent: points > 0 ? (100 * earned) / points : 0,
    };
  });
}

export function runPanel(
  record: RunRecordDict,
  baseline: BaselineResponse,
): RunPanel {
  if (record.status !== "ok" || record.breakdown === null) {
    return {
      kind: "failure",
      condition: record.condition,
      error: record.error,
      promptDigest: record.prompt_digest,
      canRetry: true,
    };
  }
  return {
    kind: "score",
    runId: record.id,
    condition: record.condition,
    temperature: record.temperature,
    report: record.output,
    percentage: record.breakdown.percentage,
    bars: categoryBars(record),
    markers: baselineMarkers(baseline),
    aboveHumanMax: record.breakdown.percentage > baseline.maximum_pct,
    mock: record.provider === "mock",
  };
}
