#!/usr/bin/env python3
"""Dense spectral audit of the unmarked walk operator for small generations.

For each generation K in 0..3 this writes <out>/k<K>.json containing the
eigenphase multiset, the spectral gap sigma (smallest nonzero eigenphase
magnitude), the +1-eigenspace dimension, overlap/residual diagnostics for the
uniform start state and the last-generation restricted start, and the
marked-subspace invariance checks for every candidate marked node.

Generations above 3 exceed the dense-capacity cap on purpose; the walk engine
itself never materializes the operator.
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from apwalk import cli

GENERATIONS = (0, 1, 2, 3)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/spectrum", help="output dir")
    args = parser.parse_args()
    root = Path(args.out)
    root.mkdir(parents=True, exist_ok=True)

    for gen in GENERATIONS:
        out = root / f"k{gen}.json"
        print(f"== generation {gen} ==", flush=True)
        code = cli.main([
            "spectrum", "--generation", str(gen), "--out", str(out),
        ])
        if code != 0:
            return code
        doc = json.loads(out.read_text())
        print(
            f"   sigma={doc['sigma']:.9f}  plus_one_dim={doc['plus_one_dim']}"
            f"  start_overlap_plus_one={doc['start_overlap_plus_one']:.9f}"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
