// View state and its pure transitions. The invariant that matters: the
// document built here is always schema-valid, so the service never sees
// a malformed submission from this client.

import type { AnnotationDoc, SessionInfo, SolveResponse } from "./types.js";

export interface PatchEntry {
  size: string; // raw input text, meters
  extent: string; // raw input text, pixels; empty means patch width
}

export interface ViewState {
  info: SessionInfo | null;
  entries: Map<string, PatchEntry>;
  selected: { row: number; col: number } | null;
  lambdaSlider: number; // 0..100, log scale with a zero stop at 0
  betaSlider: number; // 0..100, same mapping
  solve: SolveResponse | null;
  solveRevision: number; // server revision the preview was computed from
  sessionRevision: number; // latest server revision we know of
  dirty: boolean; // local edits not yet submitted
  inFlight: boolean;
  banner: string | null;
  fieldError: string | null;
}

export function initialState(): ViewState {
  return {
    info: null,
    entries: new Map(),
    selected: null,
    lambdaSlider: 50,
    betaSlider: 75,
    solve: null,
    solveRevision: -1,
    sessionRevision: 0,
    dirty: false,
    inFlight: false,
    banner: null,
    fieldError: null,
  };
}

export function patchKey(row: number, col: number): string {
  return `${row},${col}`;
}

/** Slider position to hyperparameter: 0 is an exact zero stop, the rest
 * of the track is log scale over [0.01, 100] (value 50 maps to 1). */
export function sliderToValue(position: number): number {
  if (position <= 0) return 0;
  return 10 ** (position / 25 - 2);
}

export function formatValue(value: number): string {
  if (value === 0) return "0";
  if (value >= 10) return value.toFixed(0);
  if (value >= 1) return value.toFixed(1);
  return value.toPrecision(2);
}

/** Parse one size entry; null when the text is not a positive number.
 * Sizes are meters with up to 2 decimals (finer input is rounded). */
export function parseSize(text: string): number | null {
  const trimmed = text.trim();
  if (trimmed === "") return null;
  const value = Number(trimmed);
  if (!Number.isFinite(value) || value <= 0) return null;
  return Math.round(value * 100) / 100;
}

export function parseExtent(text: string): number | null | "invalid" {
  const trimmed = text.trim();
  if (trimmed === "") return null; // default: patch width
  const value = Number(trimmed);
  if (!Number.isFinite(value) || value <= 0) return "invalid";
  return value;
}

export interface EntryView {
  row: number;
  col: number;
  size: number;
  extent: number | null;
}

/** Valid (patch, size, extent) triples from the raw entries. */
export function labeledEntries(state: ViewState): EntryView[] {
  const out: EntryView[] = [];
  if (!state.info) return out;
  for (const [key, entry] of state.entries) {
    const size = parseSize(entry.size);
    const extent = parseExtent(entry.extent);
    if (size === null || extent === "invalid") continue;
    const [row, col] = key.split(",").map(Number);
    out.push({ row, col, size, extent });
  }
  out.sort((a, b) => a.row - b.row || a.col - b.col);
  return out;
}

/** Annotation document for submission; null when nothing is labeled.
 * Only complete, positive entries are included, so the result always
 * satisfies the service schema. */
export function buildDoc(state: ViewState): AnnotationDoc | null {
  if (!state.info) return null;
  const labeled = labeledEntries(state);
  if (labeled.length === 0) return null;
  return {
    grid: { rows: state.info.grid.rows, cols: state.info.grid.cols },
    focal_length: null,
    annotations: labeled.map((e) => ({
      row: e.row,
      col: e.col,
      real_size_m: e.size,
      pixel_extent: e.extent,
    })),
  };
}

/** A preview is stale when labels changed since it was solved, either
 * locally (unsubmitted edits) or server-side (revision moved on). */
export function previewIsStale(state: ViewState): boolean {
  if (state.solveRevision < 0) return false;
  return state.dirty || state.solveRevision !== state.sessionRevision;
}

export function setEntry(state: ViewState, row: number, col: number, entry: PatchEntry): void {
  const key = patchKey(row, col);
  const previous = state.entries.get(key);
  if (previous && previous.size === entry.size && previous.extent === entry.extent) return;
  if (entry.size.trim() === "" && entry.extent.trim() === "") {
    state.entries.delete(key);
  } else {
    state.entries.set(key, entry);
  }
  state.dirty = true;
}
