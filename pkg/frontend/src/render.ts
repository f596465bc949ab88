/**
 * Pure HTML renderers for the three panels and the canvas.
 *
 * Everything here is string -> string so tests can assert on output without
 * a DOM. app.ts owns the actual mounting and event wiring.
 */

import { highlightChips, type CanvasLayout } from "./canvas.js";
import { annotationsOn } from "./edits.js";
import {
  documentsBadge,
  previewSections,
  representationBadges,
  shortDigest,
} from "./preview.js";
import type { RunPanel } from "./scoreboard.js";
import type { ConditionDict, PromptResponse, WorkspaceDict } from "./types.js";
import type { ViewState } from "./state.js";

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

function rectStyle(rect: { x: number; y: number; width: number; height: number }): string {
  return `left:${rect.x}px;top:${rect.y}px;width:${rect.width}px;height:${rect.height}px`;
}

export function renderCanvas(ws: WorkspaceDict, layout: CanvasLayout): string {
  const parts: string[] = [];

  for (const cluster of ws.clusters) {
    const rect = layout.frames.get(cluster.id);
    if (!rect) continue;
    const label = cluster.name ?? cluster.id;
    parts.push(
      `<div class="frame" data-cluster="${escapeHtml(cluster.id)}" ` +
        `style="${rectStyle(rect)}"><span class="frame-label">` +
        `${escapeHtml(label)}</span></div>`,
    );
  }

  for (const doc of ws.documents) {
    const rect = layout.cards.get(doc.id);
    if (!rect) continue;
    const relevant = ws.relevant.includes(doc.id) ? " relevant" : "";
    const chips = highlightChips(ws, doc.id)
      .map(
        (chip) =>
          `<span class="chip" data-weight="${chip.weight}">` +
          `${escapeHtml(chip.text)}${chip.weight > 1 ? ` ×${chip.weight}` : ""}</span>`,
      )
      .join("");
    const notes = annotationsOn(ws, doc.id)
      .map((a) => `<span class="note">${escapeHtml(a.text)}</span>`)
      .join("");
    parts.push(
      `<div class="card${relevant}" data-doc="${escapeHtml(doc.id)}" draggable="true" ` +
        `style="${rectStyle(rect)}">` +
        `<header>${escapeHtml(doc.title ?? doc.id)}</header>` +
        `<p>${escapeHtml(doc.body.slice(0, 120))}</p>${chips}${notes}</div>`,
    );
  }
  return parts.join("\n");
}

export function renderConditionPicker(
  conditions: ConditionDict[],
  selected: string,
): string {
  const options = conditions
    .map((c) => {
      const mark = c.name === selected ? " selected" : "";
      return `<option value="${escapeHtml(c.name)}"${mark}>${escapeHtml(c.name)}</option>`;
    })
    .join("");
  return `<select id="condition">${options}</select>`;
}

export function renderPreview(preview: PromptResponse | null): string {
  if (preview === null) {
    return `<p class="placeholder">Pick a condition to compile the prompt.</p>`;
  }
  const badges = [
    `<span class="badge badge-documents">${escapeHtml(documentsBadge(preview.manifest))}</span>`,
    ...representationBadges(preview.manifest).map(
      (b) => `<span class="badge badge-representation">${b}</span>`,
    ),
  ].join("");
  const sections = previewSections(preview)
    .map(
      (s) =>
        `<details open><summary>${escapeHtml(s.label)}</summary>` +
        `<pre>${escapeHtml(s.content)}</pre></details>`,
    )
    .join("");
  return (
    `<div class="preview-head"><code class="digest">${shortDigest(preview.digest)}</code>` +
    `${badges}</div>${sections}`
  );
}

export function renderRunPanel(panel: RunPanel | null): string {
  if (panel === null) {
    return `<p class="placeholder">No run yet.</p>`;
  }
  if (panel.kind === "failure") {
    return (
      `<div class="failure"><h3>run failed (${escapeHtml(panel.condition)})</h3>` +
      `<p>${escapeHtml(panel.error)}</p>` +
      `<code class="digest">${escapeHtml(panel.promptDigest.slice(0, 12))}</code>` +
      (panel.canRetry ? `<button id="retry-run">retry</button>` : ``) +
      `</div>`
    );
  }
  const bars = panel.bars
    .map(
      (bar) =>
        `<div class="bar-row"><span>${bar.category}</span>` +
        `<div class="bar" style="width:${bar.percent.toFixed(1)}%"></div>` +
        `<span>${bar.percent.toFixed(1)}%</span></div>`,
    )
    .join("");
  const markers = panel.markers
    .map(
      (m) =>
        `<div class="marker" style="left:${m.percent}%" title="${m.label} ${m.percent}%"></div>`,
    )
    .join("");
  const badges =
    (panel.mock ? `<span class="badge badge-mock">mock</span>` : ``) +
    (panel.aboveHumanMax ? `<span class="badge badge-best">above human max</span>` : ``);
  return (
    `<div class="score"><h3>${escapeHtml(panel.condition)} @ t=${panel.temperature}` +
    ` → ${panel.percentage}%</h3>${badges}` +
    `<div class="scale">${markers}<div class="score-dot" style="left:${panel.percentage}%"></div></div>` +
    `${bars}<pre class="report">${escapeHtml(panel.report)}</pre></div>`
  );
}

export function renderPendingTray(state: ViewState): string {
  const pending = state.pending
    .map(
      (p) =>
        `<li class="pending ${p.state}">${escapeHtml(p.edit.type)}</li>`,
    )
    .join("");
  const violations = state.violations
    .map(
      (v) =>
        `<li class="violation">${escapeHtml(v.rule)} at ${escapeHtml(v.entity)}: ` +
        `${escapeHtml(v.message)}</li>`,
    )
    .join("");
  const offline = state.offline
    ? `<p class="offline">offline — edits held<button id="retry-flush">retry</button></p>`
    : ``;
  return `${offline}<ul class="queue">${pending}</ul><ul class="violations">${violations}</ul>`;
}
