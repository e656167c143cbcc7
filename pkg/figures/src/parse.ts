/**
 * Readers for the simulator's external file formats.
 *
 *   - trace CSV: header `step,p_marked,p_subspace,p_conditional`, one row per
 *     recorded step, floats at 12 significant digits, literal `nan` where the
 *     conditional channel is undefined;
 *   - summary JSON: `{"kind": "sweep_summary", "channel": ..., "rows": [...]}`;
 *   - figure-spec JSON: one FigureSpec or an array of them.
 *
 * Every schema mismatch raises ParseError carrying the file and line.
 */

import { readFileSync, readdirSync, statSync } from "fs";
import path from "path";

import {
  FIGURE_KINDS,
  FigureKind,
  FigureSpec,
  ParseError,
  SummaryFile,
  SummaryRow,
  TraceFile,
} from "./types.js";

export const TRACE_HEADER = "step,p_marked,p_subspace,p_conditional";

// ---------------------------------------------------------------------------
// Trace CSV
// ---------------------------------------------------------------------------

function parseFloatToken(file: string, line: number, token: string): number {
  if (token === "nan") return NaN;
  const value = Number(token);
  if (token.trim() === "" || Number.isNaN(value)) {
    throw new ParseError(file, line, `not a number: "${token}"`);
  }
  return value;
}

/** Parse trace CSV text; `file` is used for error locations and the label. */
export function parseTrace(file: string, text: string, label?: string): TraceFile {
  const lines = text.split("\n").map((l) => l.replace(/\r$/, ""));
  while (lines.length > 0 && lines[lines.length - 1] === "") lines.pop();
  if (lines.length === 0) {
    throw new ParseError(file, 1, "empty trace file");
  }
  if (lines[0] !== TRACE_HEADER) {
    throw new ParseError(file, 1, `expected header "${TRACE_HEADER}", got "${lines[0]}"`);
  }
  const trace: TraceFile = {
    path: file,
    label: label ?? defaultLabel(file),
    steps: [],
    pMarked: [],
    pSubspace: [],
    pConditional: [],
  };
  for (let i = 1; i < lines.length; i++) {
    const lineNo = i + 1;
    const fields = lines[i]!.split(",");
    if (fields.length !== 4) {
      throw new ParseError(file, lineNo, `expected 4 fields, got ${fields.length}`);
    }
    const step = parseFloatToken(file, lineNo, fields[0]!);
    if (!Number.isInteger(step) || Number.isNaN(step)) {
      throw new ParseError(file, lineNo, `step must be an integer, got "${fields[0]}"`);
    }
    const prev = trace.steps[trace.steps.length - 1];
    if (prev !== undefined && step <= prev) {
      throw new ParseError(file, lineNo, `steps must increase (${prev} then ${step})`);
    }
    trace.steps.push(step);
    trace.pMarked.push(parseFloatToken(file, lineNo, fields[1]!));
    trace.pSubspace.push(parseFloatToken(file, lineNo, fields[2]!));
    trace.pConditional.push(parseFloatToken(file, lineNo, fields[3]!));
  }
  if (trace.steps.length === 0) {
    throw new ParseError(file, 1, "trace has a header but no data rows");
  }
  return trace;
}

export function readTrace(file: string, label?: string): TraceFile {
  return parseTrace(file, readText(file), label);
}

// ---------------------------------------------------------------------------
// Summary JSON
// ---------------------------------------------------------------------------

function jsonErrorLine(text: string, err: unknown): number {
  const message = err instanceof Error ? err.message : "";
  const lineMatch = /\(line (\d+) column \d+\)/.exec(message);
  if (lineMatch) return Number(lineMatch[1]);
  const posMatch = /position (\d+)/.exec(message);
  if (!posMatch) return 1;
  const pos = Math.min(Number(posMatch[1]), text.length);
  return text.slice(0, pos).split("\n").length;
}

function requireNumber(file: string, value: unknown, field: string): number {
  if (typeof value !== "number" || Number.isNaN(value)) {
    throw new ParseError(file, 1, `field "${field}" must be a number, got ${JSON.stringify(value)}`);
  }
  return value;
}

/** Parse summary JSON text; `file` is used for error locations. */
export function parseSummary(file: string, text: string): SummaryFile {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch (err) {
    throw new ParseError(file, jsonErrorLine(text, err), `invalid JSON: ${(err as Error).message}`);
  }
  if (typeof doc !== "object" || doc === null || Array.isArray(doc)) {
    throw new ParseError(file, 1, "summary document must be a JSON object");
  }
  const obj = doc as Record<string, unknown>;
  if (obj.kind !== "sweep_summary") {
    throw new ParseError(file, 1, `expected kind "sweep_summary", got ${JSON.stringify(obj.kind)}`);
  }
  if (typeof obj.channel !== "string") {
    throw new ParseError(file, 1, `field "channel" must be a string`);
  }
  if (!Array.isArray(obj.rows)) {
    throw new ParseError(file, 1, `field "rows" must be an array`);
  }
  const rows: SummaryRow[] = obj.rows.map((raw, i) => {
    if (typeof raw !== "object" || raw === null) {
      throw new ParseError(file, 1, `row ${i} must be an object`);
    }
    const r = raw as Record<string, unknown>;
    if (typeof r.group !== "string") {
      throw new ParseError(file, 1, `row ${i}: field "group" must be a string`);
    }
    if (r.generation !== null && typeof r.generation !== "number") {
      throw new ParseError(file, 1, `row ${i}: field "generation" must be a number or null`);
    }
    if (r.p_bar !== null && typeof r.p_bar !== "number") {
      throw new ParseError(file, 1, `row ${i}: field "p_bar" must be a number or null`);
    }
    return {
      group: r.group,
      generation: r.generation as number | null,
      nLast: requireNumber(file, r.n_last, `rows[${i}].n_last`),
      tP: requireNumber(file, r.t_p, `rows[${i}].t_p`),
      twoSqrtNLast: requireNumber(file, r.two_sqrt_n_last, `rows[${i}].two_sqrt_n_last`),
      pBar: r.p_bar as number | null,
    };
  });
  return { path: file, channel: obj.channel, rows };
}

export function readSummary(file: string): SummaryFile {
  return parseSummary(file, readText(file));
}

// ---------------------------------------------------------------------------
// Figure-spec JSON
// ---------------------------------------------------------------------------

function validateSpec(file: string, raw: unknown, index: number): FigureSpec {
  const where = `spec ${index}`;
  if (typeof raw !== "object" || raw === null) {
    throw new ParseError(file, 1, `${where} must be an object`);
  }
  const obj = raw as Record<string, unknown>;
  if (
    !Array.isArray(obj.inputs) ||
    obj.inputs.length === 0 ||
    obj.inputs.some((p) => typeof p !== "string")
  ) {
    throw new ParseError(file, 1, `${where}: "inputs" must be a non-empty array of strings`);
  }
  if (typeof obj.kind !== "string" || !FIGURE_KINDS.includes(obj.kind as FigureKind)) {
    throw new ParseError(
      file, 1,
      `${where}: "kind" must be one of ${FIGURE_KINDS.join(", ")}, got ${JSON.stringify(obj.kind)}`,
    );
  }
  if (typeof obj.output !== "string" || obj.output === "") {
    throw new ParseError(file, 1, `${where}: "output" must be a non-empty path`);
  }
  if (obj.title !== undefined && typeof obj.title !== "string") {
    throw new ParseError(file, 1, `${where}: "title" must be a string`);
  }
  return {
    inputs: obj.inputs as string[],
    kind: obj.kind as FigureKind,
    output: obj.output,
    title: obj.title as string | undefined,
  };
}

/** Parse a figure-spec file holding one spec or an array of specs. */
export function parseFigureSpecs(file: string, text: string): FigureSpec[] {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch (err) {
    throw new ParseError(file, jsonErrorLine(text, err), `invalid JSON: ${(err as Error).message}`);
  }
  const list = Array.isArray(doc) ? doc : [doc];
  if (list.length === 0) {
    throw new ParseError(file, 1, "spec file holds an empty array");
  }
  return list.map((raw, i) => validateSpec(file, raw, i));
}

export function readFigureSpecs(file: string): FigureSpec[] {
  return parseFigureSpecs(file, readText(file));
}

// ---------------------------------------------------------------------------
// Input expansion and labeling
// ---------------------------------------------------------------------------

function readText(file: string): string {
  try {
    return readFileSync(file, "utf-8");
  } catch (err) {
    throw new ParseError(file, 1, `cannot read file: ${(err as Error).message}`);
  }
}

function segmentToRegExp(segment: string): RegExp {
  const escaped = segment.replace(/[.+^${}()|[\]\\?]/g, "\\$&").replace(/\*/g, "[^/]*");
  return new RegExp(`^${escaped}$`);
}

/** Expand one glob pattern (only `*` within segments; no `**`). Sorted. */
export function expandGlob(pattern: string, baseDir = "."): string[] {
  const segments = pattern.split("/");
  let candidates: string[] = [pattern.startsWith("/") ? "/" : baseDir];
  for (const segment of segments) {
    if (segment === "" || segment === ".") continue;
    const next: string[] = [];
    if (!segment.includes("*")) {
      for (const dir of candidates) {
        const joined = path.join(dir, segment);
        if (exists(joined)) next.push(joined);
      }
    } else {
      const re = segmentToRegExp(segment);
      for (const dir of candidates) {
        if (!isDirectory(dir)) continue;
        for (const entry of readdirSync(dir).sort()) {
          if (re.test(entry)) next.push(path.join(dir, entry));
        }
      }
    }
    candidates = next;
  }
  return candidates.sort();
}

/**
 * Expand all of a spec's input globs (relative to `baseDir`, normally the
 * spec file's directory) to a sorted, de-duplicated file list. A pattern
 * matching nothing is an error: every referenced input must exist.
 */
export function expandInputs(patterns: string[], baseDir = "."): string[] {
  const out = new Set<string>();
  for (const pattern of patterns) {
    const matches = expandGlob(pattern, baseDir);
    if (matches.length === 0) {
      throw new ParseError(pattern, 1, "no files match this input pattern");
    }
    for (const m of matches) out.add(m);
  }
  return [...out].sort();
}

function exists(p: string): boolean {
  try {
    statSync(p);
    return true;
  } catch {
    return false;
  }
}

function isDirectory(p: string): boolean {
  try {
    return statSync(p).isDirectory();
  } catch {
    return false;
  }
}

function defaultLabel(file: string): string {
  return path.basename(file).replace(/\.csv$/, "").replace(/^trace_/, "");
}

/**
 * Derive display labels for a set of trace paths: the file stem (minus the
 * `trace_` prefix) when stems are unique, else the parent directory name
 * (so `sweeps/k4/trace_last.csv`..`k8/trace_last.csv` label as k4..k8),
 * else both joined.
 */
export function labelsForPaths(paths: string[]): string[] {
  const stems = paths.map(defaultLabel);
  if (new Set(stems).size === paths.length) return stems;
  const dirs = paths.map((p) => path.basename(path.dirname(p)));
  if (new Set(dirs).size === paths.length) return dirs;
  return paths.map((_, i) => `${dirs[i]}/${stems[i]}`);
}
