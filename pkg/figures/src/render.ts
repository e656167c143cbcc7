/**
 * Renderers for the three figure kinds.
 *
 *   - grouped_by_generation: one curve per generation group (raw marked-node
 *     probability channel) from a full-start grouped sweep;
 *   - generations_compare: overlay of restricted-sweep average curves
 *     (post-selected conditional channel), one per network generation;
 *   - summary_table: plain-text five-column analogue of the summary rows
 *     (generation, n_last, t_p, 2*sqrt(n_last), p_bar), 3-decimal rounding.
 *
 * Rendering is a pure function of the parsed inputs: identical inputs give
 * byte-identical output. Curves get a fixed line-style cycle in input order
 * (solid, dashed, dotted, dash-dot, long-dash, then repeating), and each
 * curve's peak — the earliest step within 1e-9 of its maximum, the same tie
 * rule the simulator uses — is marked and exposed as data attributes. No
 * physics is recomputed here; only reading, aggregating, and drawing.
 */

import path from "path";

import { expandInputs, labelsForPaths, readSummary, readTrace } from "./parse.js";
import { FigureSpec, ParseError, SummaryFile, SummaryRow, TraceFile } from "./types.js";

// ---------------------------------------------------------------------------
// Styling and layout constants (fixed: rendering must be deterministic)
// ---------------------------------------------------------------------------

/** SVG stroke-dasharray per curve index; "" means solid. */
export const LINE_STYLE_CYCLE: readonly { name: string; dash: string }[] = [
  { name: "solid", dash: "" },
  { name: "dashed", dash: "8,4" },
  { name: "dotted", dash: "1.5,3" },
  { name: "dash-dot", dash: "8,3,1.5,3" },
  { name: "long-dash", dash: "14,5" },
];

export const COLOR_CYCLE: readonly string[] = [
  "#1f3b6e", "#b2432f", "#2d6a4f", "#7b2d8b", "#b07d2b", "#3a7ca5", "#6b4226",
];

export const LAYOUT = {
  width: 640,
  height: 360,
  marginLeft: 52,
  marginRight: 16,
  marginTop: 40,
  marginBottom: 42,
} as const;

export const PEAK_TIE_TOL = 1e-9;

// ---------------------------------------------------------------------------
// Pure aggregation helpers
// ---------------------------------------------------------------------------

export interface Peak {
  step: number;
  value: number;
}

/**
 * Earliest step attaining the series maximum within 1e-9, skipping
 * non-finite entries; null when the series is undefined everywhere.
 * Mirrors the simulator's peak rule so plotted peaks equal summary rows.
 */
export function findPeak(steps: number[], values: number[]): Peak | null {
  let vmax = -Infinity;
  for (const v of values) {
    if (Number.isFinite(v) && v > vmax) vmax = v;
  }
  if (vmax === -Infinity) return null;
  for (let i = 0; i < values.length; i++) {
    const v = values[i]!;
    if (Number.isFinite(v) && v >= vmax - PEAK_TIE_TOL) {
      return { step: steps[i]!, value: v };
    }
  }
  return null;
}

/** The probability channel a curve kind plots. */
export function channelValues(kind: "grouped_by_generation" | "generations_compare", trace: TraceFile): number[] {
  return kind === "grouped_by_generation" ? trace.pMarked : trace.pConditional;
}

function niceTicks(min: number, max: number, count: number): number[] {
  const range = max - min || 1;
  const rough = range / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rough)));
  const nice = [1, 2, 5, 10].map((m) => m * mag);
  const step = nice.find((n) => n >= rough) ?? rough;
  const start = Math.ceil(min / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= max + step * 0.01; v += step) ticks.push(v);
  return ticks;
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

// ---------------------------------------------------------------------------
// Curve figures (SVG)
// ---------------------------------------------------------------------------

const CURVE_TITLES = {
  grouped_by_generation: "Marked-node probability, grouped by node generation",
  generations_compare: "Restricted-search conditional probability by network generation",
} as const;

const CHANNEL_NAMES = {
  grouped_by_generation: "raw",
  generations_compare: "conditional",
} as const;

/** Map a step to an x pixel for the given x-domain maximum. */
export function xOf(step: number, xMax: number): number {
  const { marginLeft, width, marginRight } = LAYOUT;
  return marginLeft + (step / (xMax || 1)) * (width - marginLeft - marginRight);
}

/** Map a probability in [0, 1] to a y pixel. */
export function yOf(prob: number): number {
  const { marginTop, height, marginBottom } = LAYOUT;
  const plotHeight = height - marginTop - marginBottom;
  return marginTop + plotHeight - prob * plotHeight;
}

/** Render an SVG overlay of one curve per input trace. */
export function renderCurves(
  kind: "grouped_by_generation" | "generations_compare",
  traces: TraceFile[],
  title?: string,
): string {
  if (traces.length === 0) {
    throw new ParseError("(inputs)", 1, "no trace files to plot");
  }
  const { width: W, height: H, marginLeft: ml, marginTop: mt } = LAYOUT;
  const pw = W - ml - LAYOUT.marginRight;
  const ph = H - mt - LAYOUT.marginBottom;
  const xMax = Math.max(...traces.map((t) => t.steps[t.steps.length - 1]!));

  let s = `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${W} ${H}" font-family="Helvetica, Arial, sans-serif" data-kind="${kind}" data-x-max="${xMax}">\n`;
  s += `<rect width="${W}" height="${H}" fill="#fff"/>\n`;
  s += `<text x="${ml}" y="${mt - 22}" font-size="12" font-weight="600" fill="#222">${esc(title ?? CURVE_TITLES[kind])}</text>\n`;
  s += `<text x="${ml}" y="${mt - 9}" font-size="8" fill="#888">channel: ${CHANNEL_NAMES[kind]} · ${traces.length} curve${traces.length === 1 ? "" : "s"}</text>\n`;

  // Grid and y ticks: probability axis fixed to [0, 1]
  for (let i = 0; i <= 5; i++) {
    const v = i / 5;
    const y = yOf(v);
    s += `<line x1="${ml}" y1="${y.toFixed(2)}" x2="${ml + pw}" y2="${y.toFixed(2)}" stroke="#eee" stroke-width="0.6"/>\n`;
    s += `<text x="${ml - 6}" y="${(y + 3).toFixed(2)}" text-anchor="end" font-size="8" fill="#555">${v.toFixed(1)}</text>\n`;
  }

  // X ticks
  for (const t of niceTicks(0, xMax, 8)) {
    const x = xOf(t, xMax);
    s += `<line x1="${x.toFixed(2)}" y1="${mt + ph}" x2="${x.toFixed(2)}" y2="${mt + ph + 4}" stroke="#333" stroke-width="0.6"/>\n`;
    s += `<text x="${x.toFixed(2)}" y="${mt + ph + 14}" text-anchor="middle" font-size="8" fill="#555">${t}</text>\n`;
  }

  // Axes frame and labels
  s += `<line x1="${ml}" y1="${mt}" x2="${ml}" y2="${mt + ph}" stroke="#333" stroke-width="0.8"/>\n`;
  s += `<line x1="${ml}" y1="${mt + ph}" x2="${ml + pw}" y2="${mt + ph}" stroke="#333" stroke-width="0.8"/>\n`;
  s += `<text x="${ml + pw / 2}" y="${H - 6}" text-anchor="middle" font-size="9" fill="#444">step</text>\n`;
  s += `<text x="14" y="${mt + ph / 2}" text-anchor="middle" font-size="9" fill="#444" transform="rotate(-90,14,${mt + ph / 2})">probability</text>\n`;

  // Curves: fixed style cycle in input order, peaks exposed as data attrs
  traces.forEach((trace, idx) => {
    const style = LINE_STYLE_CYCLE[idx % LINE_STYLE_CYCLE.length]!;
    const color = COLOR_CYCLE[idx % COLOR_CYCLE.length]!;
    const values = channelValues(kind, trace);
    const peak = findPeak(trace.steps, values);
    const peakAttrs = peak === null
      ? ` data-peak-step="" data-peak-prob=""`
      : ` data-peak-step="${peak.step}" data-peak-prob="${peak.value}"`;
    s += `<g class="curve" data-label="${esc(trace.label)}" data-style="${style.name}"${peakAttrs}>\n`;

    // Split the polyline at non-finite points so undefined stretches show gaps
    let run: string[] = [];
    const flush = () => {
      if (run.length === 1) {
        s += `<circle cx="${run[0]!.split(",")[0]}" cy="${run[0]!.split(",")[1]}" r="1" fill="${color}"/>\n`;
      } else if (run.length > 1) {
        const dash = style.dash === "" ? "" : ` stroke-dasharray="${style.dash}"`;
        s += `<polyline fill="none" stroke="${color}" stroke-width="1.2"${dash} points="${run.join(" ")}"/>\n`;
      }
      run = [];
    };
    for (let i = 0; i < trace.steps.length; i++) {
      const v = values[i]!;
      if (!Number.isFinite(v)) {
        flush();
        continue;
      }
      run.push(`${xOf(trace.steps[i]!, xMax).toFixed(2)},${yOf(v).toFixed(2)}`);
    }
    flush();

    if (peak !== null) {
      s += `<circle class="peak" cx="${xOf(peak.step, xMax).toFixed(2)}" cy="${yOf(peak.value).toFixed(2)}" r="2.6" fill="${color}" stroke="#fff" stroke-width="0.7"/>\n`;
    }
    s += `</g>\n`;
  });

  // Legend (top-right, one line sample per curve)
  const legendW = Math.max(...traces.map((t) => t.label.length)) * 5.5 + 34;
  const legendH = traces.length * 12 + 6;
  const lx = ml + pw - legendW - 4;
  const ly = mt + 4;
  s += `<rect x="${lx}" y="${ly}" width="${legendW}" height="${legendH}" rx="2" fill="#fff" fill-opacity="0.88" stroke="#ddd" stroke-width="0.5"/>\n`;
  traces.forEach((trace, idx) => {
    const style = LINE_STYLE_CYCLE[idx % LINE_STYLE_CYCLE.length]!;
    const color = COLOR_CYCLE[idx % COLOR_CYCLE.length]!;
    const yy = ly + 10 + idx * 12;
    const dash = style.dash === "" ? "" : ` stroke-dasharray="${style.dash}"`;
    s += `<line x1="${lx + 6}" y1="${yy}" x2="${lx + 26}" y2="${yy}" stroke="${color}" stroke-width="1.2"${dash}/>\n`;
    s += `<text x="${lx + 30}" y="${yy + 3}" font-size="8" fill="#444">${esc(trace.label)}</text>\n`;
  });

  s += `</svg>\n`;
  return s;
}

// ---------------------------------------------------------------------------
// Summary table (plain text)
// ---------------------------------------------------------------------------

function round3(v: number): string {
  return v.toFixed(3);
}

/**
 * Merge summary rows (file order, row order) into the five-column table
 * analogue: generation, n_last, t_p, 2*sqrt(n_last), p_bar, with the two
 * float columns rounded to 3 decimals. All inputs must share one channel.
 */
export function renderSummaryTable(summaries: SummaryFile[]): string {
  if (summaries.length === 0) {
    throw new ParseError("(inputs)", 1, "no summary files to tabulate");
  }
  const channel = summaries[0]!.channel;
  for (const file of summaries) {
    if (file.channel !== channel) {
      throw new ParseError(
        file.path, 1,
        `channel mismatch: expected "${channel}", got "${file.channel}"`,
      );
    }
  }
  const rows: SummaryRow[] = summaries.flatMap((f) => f.rows);
  const header = ["generation", "n_last", "t_p", "2*sqrt(n_last)", `p_bar[${channel}]`];
  const cells = [header];
  for (const row of rows) {
    cells.push([
      row.generation === null ? row.group : String(row.generation),
      String(row.nLast),
      String(row.tP),
      round3(row.twoSqrtNLast),
      row.pBar === null ? "nan" : round3(row.pBar),
    ]);
  }
  const widths = header.map((_, c) => Math.max(...cells.map((r) => r[c]!.length)));
  const lines = cells.map((r) => r.map((cell, c) => cell.padEnd(widths[c]!)).join("  ").trimEnd());
  lines.splice(1, 0, widths.map((w) => "-".repeat(w)).join("  "));
  return lines.join("\n") + "\n";
}

// ---------------------------------------------------------------------------
// Spec-level entry points
// ---------------------------------------------------------------------------

export type FigureInputs =
  | { traces: TraceFile[]; summaries?: undefined }
  | { summaries: SummaryFile[]; traces?: undefined };

/** Pure renderer: spec + parsed inputs -> output file content. */
export function renderFigure(spec: FigureSpec, inputs: FigureInputs): string {
  if (spec.kind === "summary_table") {
    if (!inputs.summaries) {
      throw new ParseError("(inputs)", 1, "summary_table needs summary inputs");
    }
    return renderSummaryTable(inputs.summaries);
  }
  if (!inputs.traces) {
    throw new ParseError("(inputs)", 1, `${spec.kind} needs trace inputs`);
  }
  return renderCurves(spec.kind, inputs.traces, spec.title);
}

/**
 * Expand and parse a spec's inputs. Curve kinds read trace CSVs (labels
 * derived from paths); summary_table reads summary JSONs. `baseDir` anchors
 * relative globs (normally the spec file's directory).
 */
export function loadInputs(spec: FigureSpec, baseDir = "."): FigureInputs {
  const files = expandInputs(spec.inputs, baseDir);
  if (spec.kind === "summary_table") {
    return { summaries: files.map((f) => readSummary(f)) };
  }
  const labels = labelsForPaths(files);
  return { traces: files.map((f, i) => readTrace(f, labels[i]!)) };
}

/** Load, render, and return { output path, content } for one spec. */
export function renderSpec(
  spec: FigureSpec,
  baseDir = ".",
): { output: string; content: string } {
  const content = renderFigure(spec, loadInputs(spec, baseDir));
  return { output: path.resolve(baseDir, spec.output), content };
}
