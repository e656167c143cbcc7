#!/usr/bin/env python3
"""Fit the peak-step scaling law T(K) = alpha * 3**(K/2) to sweep summaries.

Reads the per-generation summary.json files produced by
scripts/run_restricted_sweeps.py, fits the single coefficient alpha by least
squares (3**K is proportional to the last-generation node count, so this is
the square-root scaling T ~ 2*sqrt(N_last) up to the constant), and prints
measured versus fitted peak steps together with the 2*sqrt(N_last) reference.
Writes the fit, per-generation residuals, and expected measurement costs
T_p / p_bar to <sweeps>/scaling.json.
"""

from __future__ import annotations

import argparse
import json
import math
from pathlib import Path

from apwalk import expected_cost, fit_alpha, io

GENERATIONS = (4, 5, 6, 7, 8)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--sweeps", default="results/sweeps",
        help="root directory holding k<K>/summary.json",
    )
    args = parser.parse_args()
    root = Path(args.sweeps)

    observations: list[tuple[int, float]] = []
    rows = {}
    for gen in GENERATIONS:
        path = root / f"k{gen}" / "summary.json"
        if not path.exists():
            print(f"missing {path}; run scripts/run_restricted_sweeps.py first")
            return 2
        (row,), _channel = io.read_summary(path)
        observations.append((gen, float(row.t_p)))
        rows[gen] = row

    fit = fit_alpha(observations)
    print(f"alpha = {fit.alpha:.6f}   (2/sqrt(3) = {2 / math.sqrt(3):.6f})")
    print(f"{'K':>2} {'n_last':>6} {'t_p':>5} {'fit':>8} {'2*sqrt(n)':>10} "
          f"{'p_bar':>9} {'cost t/p':>9}")
    doc_rows = []
    for gen, row in rows.items():
        fitted = fit.predict(gen)
        reference = 2.0 * math.sqrt(row.n_last)
        cost = expected_cost(row.t_p, row.p_bar)
        print(f"{gen:>2} {row.n_last:>6} {row.t_p:>5} {fitted:>8.2f} "
              f"{reference:>10.2f} {row.p_bar:>9.6f} {cost:>9.3f}")
        doc_rows.append({
            "generation": gen,
            "n_last": row.n_last,
            "t_p": row.t_p,
            "fitted": fitted,
            "two_sqrt_n_last": reference,
            "p_bar": row.p_bar,
            "expected_cost": cost,
        })

    out = root / "scaling.json"
    out.write_text(json.dumps(
        {"kind": "scaling_fit", "alpha": fit.alpha,
         "residuals": [[k, r] for k, r in fit.residuals], "rows": doc_rows},
        indent=2, sort_keys=True,
    ) + "\n")
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
