#!/usr/bin/env python3
"""Per-generation group curves for the K = 6 network.

Marks every node in turn, averages the raw marked-node probability within
each generation group (gen0 .. gen6), and records one trace per group over the
full-space horizon.  This is the input for the grouped-by-generation figure.

Artifacts (external file formats, written by the command-line interface):

    <out>/trace_gen<g>.csv      one averaged trace per generation group
    <out>/summary.json          per-group peak rows, raw channel
    <out>/summary.txt           the same table as text
    <out>/manifest.json         command, parameters, seed, outputs

Note the gen5 group's global raw-channel maximum sits on a revival lobe near
step 75, well after its first-approach lobe near step 22; peak steps read off
this summary are therefore not monotone in generation.
"""

from __future__ import annotations

import argparse

from apwalk import cli


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/grouped_k6", help="output dir")
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args()
    return cli.main([
        "sweep",
        "--generation", "6",
        "--marked-set", "all",
        "--group-by-generation",
        "--channel", "raw",
        "--out", args.out,
        "--workers", str(args.workers),
    ])


if __name__ == "__main__":
    raise SystemExit(main())
