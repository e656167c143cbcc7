"""File formats: probability traces, sweep summaries, run manifests, graphs.

All numeric serialization uses 12 significant digits and the literal token
``nan`` for undefined conditional probabilities, so reruns with identical
parameters produce byte-identical files.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import graphs
from .errors import FormatError
from .search import ProbabilityTrace

TRACE_HEADER = "step,p_marked,p_subspace,p_conditional"
SIGNIFICANT_DIGITS = 12


def format_number(value: float) -> str:
    """12-significant-digit decimal, ``nan`` for undefined values."""
    if math.isnan(value):
        return "nan"
    return f"{value:.{SIGNIFICANT_DIGITS}g}"


def write_trace(trace: ProbabilityTrace, path: str | Path) -> None:
    lines = [TRACE_HEADER]
    for i, step in enumerate(trace.steps):
        lines.append(
            f"{int(step)},{format_number(trace.p_marked[i])},"
            f"{format_number(trace.p_subspace[i])},"
            f"{format_number(trace.p_conditional[i])}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


def read_trace(path: str | Path) -> ProbabilityTrace:
    """Parse a trace CSV; metadata fields of the result are unset (None)."""
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines:
        raise FormatError("empty trace file", location=f"{path}:1")
    if lines[0] != TRACE_HEADER:
        raise FormatError(
            f"expected header {TRACE_HEADER!r}, got {lines[0]!r}",
            location=f"{path}:1",
        )
    steps, pm, ps, pc = [], [], [], []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 4:
            raise FormatError(
                f"expected 4 comma-separated fields, got {len(parts)}",
                location=f"{path}:{lineno}",
            )
        try:
            steps.append(int(parts[0]))
            pm.append(float(parts[1]))
            ps.append(float(parts[2]))
            pc.append(float(parts[3]))
        except ValueError as exc:
            raise FormatError(str(exc), location=f"{path}:{lineno}") from None
    return ProbabilityTrace(
        steps=np.asarray(steps, dtype=np.int64),
        p_marked=np.asarray(pm),
        p_subspace=np.asarray(ps),
        p_conditional=np.asarray(pc),
        generation=None,
        marked=None,
        init_set=None,
    )


@dataclass
class SummaryRow:
    """One line of the benchmark table: peak step and height per network size."""

    group: str
    generation: int | None
    n_last: int
    t_p: int
    two_sqrt_n_last: float
    p_bar: float


def summary_to_json(rows: list[SummaryRow], channel: str) -> dict:
    return {
        "kind": "sweep_summary",
        "channel": channel,
        "rows": [
            {
                "group": row.group,
                "generation": row.generation,
                "n_last": row.n_last,
                "t_p": row.t_p,
                "two_sqrt_n_last": float(f"{row.two_sqrt_n_last:.{SIGNIFICANT_DIGITS}g}"),
                "p_bar": None if math.isnan(row.p_bar)
                else float(f"{row.p_bar:.{SIGNIFICANT_DIGITS}g}"),
            }
            for row in rows
        ],
    }


def write_summary(rows: list[SummaryRow], channel: str, path: str | Path) -> None:
    doc = summary_to_json(rows, channel)
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def read_summary(path: str | Path) -> tuple[list[SummaryRow], str]:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(str(exc), location=str(path)) from None
    if not isinstance(doc, dict) or doc.get("kind") != "sweep_summary":
        raise FormatError("not a sweep_summary document", location=str(path))
    rows = []
    for i, raw in enumerate(doc.get("rows", [])):
        try:
            rows.append(
                SummaryRow(
                    group=raw["group"],
                    generation=raw["generation"],
                    n_last=int(raw["n_last"]),
                    t_p=int(raw["t_p"]),
                    two_sqrt_n_last=float(raw["two_sqrt_n_last"]),
                    p_bar=math.nan if raw["p_bar"] is None else float(raw["p_bar"]),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(
                f"bad summary row {i}: {exc}", location=str(path)
            ) from None
    return rows, doc.get("channel", "")


def summary_text(rows: list[SummaryRow], channel: str) -> str:
    """Human-readable aligned table mirroring the JSON summary."""
    header = ("group", "generation", "n_last", "t_p", "2*sqrt(n_last)", f"p_bar[{channel}]")
    cells = [header]
    for row in rows:
        cells.append(
            (
                row.group,
                "-" if row.generation is None else str(row.generation),
                str(row.n_last),
                str(row.t_p),
                f"{row.two_sqrt_n_last:.4f}",
                "nan" if math.isnan(row.p_bar) else f"{row.p_bar:.6f}",
            )
        )
    widths = [max(len(r[c]) for r in cells) for c in range(len(header))]
    lines = ["  ".join(cell.ljust(widths[c]) for c, cell in enumerate(r)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def write_manifest(
    path: str | Path,
    command: str,
    parameters: dict,
    seed: int | None,
    outputs: list[str],
    duration_seconds: float,
    version: str,
) -> None:
    """Reproducibility record; callers must write this after all other outputs."""
    doc = {
        "command": command,
        "parameters": parameters,
        "seed": seed,
        "version": version,
        "outputs": outputs,
        "duration_seconds": round(duration_seconds, 3),
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def write_graph(graph: graphs.ApollonianNetwork, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(graphs.serialize(graph), indent=2, sort_keys=True) + "\n"
    )


def read_graph(path: str | Path) -> graphs.ApollonianNetwork:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(str(exc), location=str(path)) from None
    try:
        return graphs.deserialize(doc)
    except FormatError as exc:
        raise FormatError(str(exc), location=str(path)) from None
