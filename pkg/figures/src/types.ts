/**
 * Shared types for the apwalk figure pipeline.
 *
 * The pipeline reads the simulator CLI's trace CSV and summary JSON files
 * bit-exactly as written, aggregates them, and draws SVG figures or
 * plain-text tables. It never recomputes any physics: every number that
 * appears in an output was read from an input file or derived from plotted
 * data by pure aggregation (argmax, rounding, coordinate mapping).
 */

// ---------------------------------------------------------------------------
// Figure specification
// ---------------------------------------------------------------------------

/** What to draw. Matches the three figure products of the simulator. */
export type FigureKind =
  | "grouped_by_generation" // one curve per generation group, raw channel
  | "generations_compare"   // overlay of restricted-sweep curves, conditional
  | "summary_table";        // five-column text analogue of the summary rows

export const FIGURE_KINDS: readonly FigureKind[] = [
  "grouped_by_generation",
  "generations_compare",
  "summary_table",
];

/** One renderable unit: input globs, figure kind, output path. */
export interface FigureSpec {
  /** Glob patterns (only `*` within path segments) for the input files. */
  inputs: string[];
  kind: FigureKind;
  /** Output path for the SVG (curves) or text table. */
  output: string;
  /** Optional title line; defaults to a kind-specific one. */
  title?: string;
}

// ---------------------------------------------------------------------------
// Parsed input files
// ---------------------------------------------------------------------------

/** A parsed trace CSV: per-step probabilities for one (averaged) walk. */
export interface TraceFile {
  path: string;
  /** Display label derived from the file path (e.g. "k4", "gen5"). */
  label: string;
  steps: number[];
  pMarked: number[];
  pSubspace: number[];
  /** `NaN` where the file holds the undefined-value token. */
  pConditional: number[];
}

/** One row of a sweep summary. */
export interface SummaryRow {
  group: string;
  generation: number | null;
  nLast: number;
  tP: number;
  twoSqrtNLast: number;
  /** `null` when the channel was undefined at every step of the sweep. */
  pBar: number | null;
}

/** A parsed summary JSON document. */
export interface SummaryFile {
  path: string;
  channel: string;
  rows: SummaryRow[];
}

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/** Schema mismatch or unreadable input, located by file and line. */
export class ParseError extends Error {
  readonly file: string;
  readonly line: number;

  constructor(file: string, line: number, message: string) {
    super(`${file}:${line}: ${message}`);
    this.name = "ParseError";
    this.file = file;
    this.line = line;
  }
}
