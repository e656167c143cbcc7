import { describe, expect, it } from "vitest";
import { fileURLToPath } from "url";
import path from "path";

import {
  LINE_STYLE_CYCLE,
  findPeak,
  loadInputs,
  renderCurves,
  renderFigure,
  renderSpec,
  renderSummaryTable,
  xOf,
  yOf,
} from "../src/render.js";
import {
  TRACE_HEADER,
  parseTrace,
  readFigureSpecs,
  readSummary,
} from "../src/parse.js";
import { FigureSpec, SummaryFile } from "../src/types.js";

const ROOT = fileURLToPath(new URL("..", import.meta.url));
const SPECS = path.join(ROOT, "specs");
const FIXTURES = path.join(ROOT, "fixtures");

const COMPARE_SPEC: FigureSpec = {
  inputs: ["fixtures/sweeps/k*/trace_last.csv"],
  kind: "generations_compare",
  output: "unused.svg",
};

const GROUPED_SPEC: FigureSpec = {
  inputs: ["fixtures/grouped_k6/trace_gen*.csv"],
  kind: "grouped_by_generation",
  output: "unused.svg",
};

const TABLE_SPEC: FigureSpec = {
  inputs: ["fixtures/sweeps/k*/summary.json"],
  kind: "summary_table",
  output: "unused.txt",
};

interface CurveAttrs {
  label: string;
  style: string;
  peakStep: number;
  peakProb: number;
  markerCx: string;
  markerCy: string;
}

function curveAttrs(svg: string): CurveAttrs[] {
  const out: CurveAttrs[] = [];
  const groups = svg.split(`<g class="curve"`).slice(1);
  for (const g of groups) {
    const head = /^ data-label="([^"]*)" data-style="([^"]*)" data-peak-step="([^"]*)" data-peak-prob="([^"]*)">/.exec(g);
    expect(head).not.toBeNull();
    const marker = /<circle class="peak" cx="([^"]*)" cy="([^"]*)"/.exec(
      g.slice(0, g.indexOf("</g>")),
    );
    out.push({
      label: head![1]!,
      style: head![2]!,
      peakStep: Number(head![3]),
      peakProb: Number(head![4]),
      markerCx: marker?.[1] ?? "",
      markerCy: marker?.[2] ?? "",
    });
  }
  return out;
}

// ---------------------------------------------------------------------------
// findPeak: same tie rule as the simulator's summary writer
// ---------------------------------------------------------------------------

describe("findPeak", () => {
  it("returns the earliest step within 1e-9 of the maximum", () => {
    expect(findPeak([0, 1, 2, 3], [0.1, 0.5, 0.5 + 5e-10, 0.2])).toEqual({
      step: 1,
      value: 0.5,
    });
  });

  it("skips non-finite values", () => {
    expect(findPeak([0, 1, 2], [NaN, 0.3, 0.1])).toEqual({ step: 1, value: 0.3 });
  });

  it("returns null when the series is undefined everywhere", () => {
    expect(findPeak([0, 1], [NaN, NaN])).toBeNull();
  });
});

// ---------------------------------------------------------------------------
// Generations-compare overlay (conditional channel)
// ---------------------------------------------------------------------------

describe("generations_compare", () => {
  const inputs = loadInputs(COMPARE_SPEC, ROOT);
  const svg = renderFigure(COMPARE_SPEC, inputs);
  const curves = curveAttrs(svg);

  it("plots five curves labeled by generation directory", () => {
    expect(curves.map((c) => c.label)).toEqual(["k4", "k5", "k6", "k7", "k8"]);
  });

  it("cycles line styles solid, dashed, dotted, dash-dot, long-dash", () => {
    expect(LINE_STYLE_CYCLE.map((s) => s.name)).toEqual([
      "solid", "dashed", "dotted", "dash-dot", "long-dash",
    ]);
    expect(curves.map((c) => c.style)).toEqual([
      "solid", "dashed", "dotted", "dash-dot", "long-dash",
    ]);
    // solid curve has no dasharray; the others do
    const polys = svg.split(`<g class="curve"`).slice(1);
    expect(polys[0]).not.toContain("stroke-dasharray");
    expect(polys[1]).toContain(`stroke-dasharray="8,4"`);
    expect(polys[2]).toContain(`stroke-dasharray="1.5,3"`);
  });

  it("marks peaks whose coordinates equal the summary (t_p, p_bar) exactly", () => {
    for (const curve of curves) {
      const gen = curve.label.slice(1);
      const summary = readSummary(
        path.join(FIXTURES, "sweeps", `k${gen}`, "summary.json"),
      );
      const row = summary.rows[0]!;
      expect(curve.peakStep).toBe(row.tP);
      expect(curve.peakProb).toBe(row.pBar); // exact float equality
    }
  });

  it("places each peak marker at the mapped data coordinates", () => {
    const xMax = Number(/data-x-max="([^"]*)"/.exec(svg)![1]);
    for (const curve of curves) {
      expect(curve.markerCx).toBe(xOf(curve.peakStep, xMax).toFixed(2));
      expect(curve.markerCy).toBe(yOf(curve.peakProb).toFixed(2));
    }
  });

  it("is a pure function of its inputs", () => {
    expect(renderFigure(COMPARE_SPEC, inputs)).toBe(svg);
    expect(renderFigure(COMPARE_SPEC, loadInputs(COMPARE_SPEC, ROOT))).toBe(svg);
  });
});

// ---------------------------------------------------------------------------
// Grouped-by-generation figure (raw channel)
// ---------------------------------------------------------------------------

describe("grouped_by_generation", () => {
  const inputs = loadInputs(GROUPED_SPEC, ROOT);
  const svg = renderFigure(GROUPED_SPEC, inputs);
  const curves = curveAttrs(svg);

  it("plots one curve per generation group", () => {
    expect(curves.map((c) => c.label)).toEqual([
      "gen0", "gen1", "gen2", "gen3", "gen4", "gen5", "gen6",
    ]);
  });

  it("uses the raw marked-probability channel", () => {
    // peaks must equal the raw-channel argmax of each trace file
    for (let i = 0; i < curves.length; i++) {
      const trace = inputs.traces![i]!;
      const peak = findPeak(trace.steps, trace.pMarked)!;
      expect(curves[i]!.peakStep).toBe(peak.step);
      expect(curves[i]!.peakProb).toBe(peak.value);
    }
    // regression anchor: the gen5 group's raw maximum sits on the revival
    // lobe at step 75, not on the first-approach lobe near step 22
    expect(curves.map((c) => c.peakStep)).toEqual([27, 88, 54, 74, 20, 75, 32]);
  });

  it("restarts the style cycle after five curves", () => {
    expect(curves[5]!.style).toBe("solid");
    expect(curves[6]!.style).toBe("dashed");
  });
});

// ---------------------------------------------------------------------------
// Single-trace figure and gap handling
// ---------------------------------------------------------------------------

describe("single traces and gaps", () => {
  it("renders a single trace file as a single-curve figure", () => {
    const spec: FigureSpec = {
      inputs: ["fixtures/sweeps/k4/trace_last.csv"],
      kind: "generations_compare",
      output: "unused.svg",
    };
    const svg = renderFigure(spec, loadInputs(spec, ROOT));
    const curves = curveAttrs(svg);
    expect(curves.length).toBe(1);
    expect(curves[0]!.peakStep).toBe(10);
    expect(svg).toContain("1 curve<");
  });

  it("breaks the polyline where the plotted channel is undefined", () => {
    const text = `${TRACE_HEADER}\n0,0.1,0.5,0.2\n1,0.1,0,nan\n2,0.1,0.5,0.3\n3,0.1,0.5,0.1\n`;
    const trace = parseTrace("t.csv", text, "t");
    const svg = renderCurves("generations_compare", [trace]);
    const body = svg.split(`<g class="curve"`)[1]!;
    const polylines = body.split("</g>")[0]!.match(/<polyline /g) ?? [];
    const dots = body.split("</g>")[0]!.match(/<circle cx=/g) ?? [];
    // one isolated point before the gap, one two-point segment after it
    expect(dots.length).toBe(1);
    expect(polylines.length).toBe(1);
  });
});

// ---------------------------------------------------------------------------
// Summary table
// ---------------------------------------------------------------------------

describe("summary_table", () => {
  const inputs = loadInputs(TABLE_SPEC, ROOT);
  const text = renderFigure(TABLE_SPEC, inputs);
  const lines = text.trimEnd().split("\n");

  it("renders the five-column header and one row per summary row", () => {
    expect(lines[0]!.split(/\s+/)).toEqual([
      "generation", "n_last", "t_p", "2*sqrt(n_last)", "p_bar[conditional]",
    ]);
    expect(lines.length).toBe(2 + 5); // header, dashes, five generations
  });

  it("matches the summary rows after rounding to 3 decimals", () => {
    const summaries = inputs.summaries!;
    const rows = summaries.flatMap((s: SummaryFile) => s.rows);
    for (let i = 0; i < rows.length; i++) {
      const row = rows[i]!;
      const fields = lines[i + 2]!.split(/\s+/);
      expect(fields).toEqual([
        String(row.generation),
        String(row.nLast),
        String(row.tP),
        row.twoSqrtNLast.toFixed(3),
        row.pBar!.toFixed(3),
      ]);
    }
  });

  it("renders a null p_bar as nan", () => {
    const table = renderSummaryTable([
      {
        path: "s.json",
        channel: "conditional",
        rows: [
          { group: "g", generation: null, nLast: 3, tP: 2, twoSqrtNLast: 3.4641, pBar: null },
        ],
      },
    ]);
    const row = table.trimEnd().split("\n")[2]!.split(/\s+/);
    expect(row).toEqual(["g", "3", "2", "3.464", "nan"]);
  });

  it("rejects mixed channels, naming the offending file", () => {
    const a: SummaryFile = { path: "a.json", channel: "conditional", rows: [] };
    const b: SummaryFile = { path: "b.json", channel: "raw", rows: [] };
    expect(() => renderSummaryTable([a, b])).toThrowError(/b\.json:1: channel mismatch/);
  });
});

// ---------------------------------------------------------------------------
// Spec-level drive (same path the CLI takes)
// ---------------------------------------------------------------------------

describe("renderSpec on the committed spec files", () => {
  it("renders every spec in specs/all.json deterministically", () => {
    const specs = readFigureSpecs(path.join(SPECS, "all.json"));
    expect(specs.length).toBe(3);
    for (const spec of specs) {
      const first = renderSpec(spec, SPECS);
      const second = renderSpec(spec, SPECS);
      expect(first.content).toBe(second.content);
      expect(first.content.length).toBeGreaterThan(100);
      expect(first.output).toBe(path.resolve(SPECS, spec.output));
    }
  });

  it("refuses kind/input mismatches", () => {
    expect(() =>
      renderFigure(TABLE_SPEC, { traces: [] }),
    ).toThrowError(/summary_table needs summary inputs/);
    expect(() =>
      renderFigure(COMPARE_SPEC, { summaries: [] }),
    ).toThrowError(/needs trace inputs/);
  });
});
