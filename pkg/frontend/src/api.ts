/** Shapes of the backend JSON contracts and raw-text helpers. */

export type FieldKind = "numeric" | "categorical" | "binary";

export interface SchemaField {
  name: string;
  kind: FieldKind;
  categories: string[];
  service_field: boolean;
}

export interface SchemaResponse {
  fields: SchemaField[];
}

export interface Recommendation {
  package_id: string;
  name: string;
  p_above: number;
  rank: number;
}

export interface WhatifResponse {
  recommendations: Recommendation[];
}

/** A recommendation plus the probability exactly as the server wrote it. */
export interface RankedEntry extends Recommendation {
  pAboveRaw: string;
}

export interface GridRow {
  Model: string;
  Binning: string;
  Accuracy: number;
  AUC: number;
  "TP rate": number | null;
  "FP rate": number | null;
  H: number;
  Selector: string | null;
}

export interface GridReport {
  rows: GridRow[];
}

const P_ABOVE_LITERAL = /"p_above"\s*:\s*([0-9eE+.-]+)/g;

/**
 * Pull every `p_above` number literal out of the raw response text, in
 * order. The UI displays these bytes verbatim instead of re-formatting
 * parsed floats, so no probability math ever happens client-side.
 */
export function extractRawProbabilities(rawJson: string): string[] {
  const out: string[] = [];
  for (const match of rawJson.matchAll(P_ABOVE_LITERAL)) {
    out.push(match[1]);
  }
  return out;
}

export function parseWhatif(rawJson: string): RankedEntry[] {
  const parsed = JSON.parse(rawJson) as WhatifResponse;
  const raws = extractRawProbabilities(rawJson);
  if (raws.length !== parsed.recommendations.length) {
    throw new Error("probability literals do not align with recommendations");
  }
  return parsed.recommendations.map((rec, i) => ({ ...rec, pAboveRaw: raws[i] }));
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
