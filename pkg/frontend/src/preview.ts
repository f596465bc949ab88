/**
 * Prompt preview model: badges and sections derived from a compiled bundle.
 *
 * The badge list is computed from the manifest the server returns, never
 * from the client's idea of the condition, so what the panel claims always
 * matches what the prompt actually contains.
 */

import type { ManifestDict, MessageDict, PromptResponse } from "./types.js";

/**
 * Steering-layer badges. The documents badge is always present (it names
 * the visibility mode); the representation badges appear only when the
 * matching layer is actually in the compiled prompt. E1 therefore shows
 * the documents badge alone.
 */
export type RepresentationBadge =
  | "structure"
  | "names"
  | "highlights"
  | "annotations"
  | "connections";

export function documentsBadge(manifest: ManifestDict): string {
  return `documents: ${manifest.documents}`;
}

export function representationBadges(manifest: ManifestDict): RepresentationBadge[] {
  const badges: RepresentationBadge[] = [];
  if (manifest.documents === "structure") badges.push("structure");
  if (manifest.cluster_names) badges.push("names");
  if (manifest.highlights) badges.push("highlights");
  if (manifest.annotations) badges.push("annotations");
  if (manifest.connections) badges.push("connections");
  return badges;
}

export interface PreviewSection {
  label: string;
  content: string;
}

/**
 * Split a bundle into labelled panels: framing, report shape, documents,
 * and one panel per extra steering section. The extra user message packs
 * its sections as lead-in + JSON blocks separated by blank lines; we split
 * on the known lead-ins so each gets its own panel.
 */
const SECTION_LEAD_INS: Array<[RepresentationBadge, string]> = [
  ["annotations", "I have attached annotations"],
  ["highlights", "I have some word weights"],
  ["connections", "I have connected the related objects"],
];

export function previewSections(preview: PromptResponse): PreviewSection[] {
  const sections: PreviewSection[] = [];
  const [system, shape, documents, extra] = preview.messages;
  if (system) sections.push({ label: "framing", content: system.content });
  if (shape) sections.push({ label: "report shape", content: shape.content });
  if (documents) {
    sections.push({
      label: documentsBadge(preview.manifest),
      content: documents.content,
    });
  }
  if (extra) sections.push(...splitExtra(extra));
  return sections;
}

function splitExtra(message: MessageDict): PreviewSection[] {
  const text = message.content;
  type Cut = { label: string; at: number };
  const cuts: Cut[] = [];
  for (const [label, leadIn] of SECTION_LEAD_INS) {
    const at = text.indexOf(leadIn);
    if (at >= 0) cuts.push({ label, at });
  }
  cuts.sort((a, b) => a.at - b.at);
  if (cuts.length === 0) return [{ label: "extra", content: text }];
  return cuts.map((cut, i) => {
    const end = i + 1 < cuts.length ? cuts[i + 1]!.at : text.length;
    return { label: cut.label, content: text.slice(cut.at, end).trimEnd() };
  });
}

/** Short digest form shown in the panel header. */
export function shortDigest(digest: string): string {
  return digest.slice(0, 12);
}
