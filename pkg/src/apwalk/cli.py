"""Command-line interface.

Subcommands
-----------
generate   build a network and write its JSON document
search     evolve one marked-node walk and write the probability trace CSV
sweep      average traces over marked candidates; write per-group traces,
           a benchmark-table summary (JSON + text) and the fitted scaling
spectrum   dense spectral report and invariant-subspace residual checks

Exit codes: 0 success, 2 parameter/format error, 3 capacity refusal,
4 internal contract violation or unexpected failure.

Every run writes a manifest JSON (command, parameters, seed, version, output
paths, wall-clock duration) as its final artifact, so a directory is complete
exactly when its manifest exists.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

from . import __version__, graphs, io, search, spectral, walk
from .errors import (
    CapacityError,
    ContractViolation,
    FormatError,
    ParameterError,
)

DEFAULT_SEED = 3283  # node count of the generation-8 network; arbitrary but fixed

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CAPACITY = 3
EXIT_INTERNAL = 4


def _load_or_build_graph(args: argparse.Namespace) -> graphs.ApollonianNetwork:
    if getattr(args, "graph", None):
        return io.read_graph(args.graph)
    if args.generation is None:
        raise ParameterError("one of --graph or --generation is required")
    return graphs.build_apollonian(args.generation)


def _parse_init(value: str) -> search.InitSet:
    return search.InitSet(value)


def cmd_generate(args: argparse.Namespace) -> list[str]:
    if args.kind == "random":
        args.kind = graphs.KIND_RANDOM
    if args.kind == graphs.KIND_DETERMINISTIC:
        if args.generation is None:
            raise ParameterError("--generation is required for kind apollonian")
        graph = graphs.build_apollonian(args.generation)
    else:
        if args.iterations is None or args.subdivisions is None:
            raise ParameterError(
                "--iterations and --subdivisions are required for kind "
                f"{graphs.KIND_RANDOM}"
            )
        graph = graphs.build_random_apollonian(
            args.iterations, args.subdivisions, seed=args.seed
        )
    io.write_graph(graph, args.out)
    counts = f"{graph.n_nodes} nodes, {graph.n_edges} edges"
    print(f"wrote {args.out} ({graph.kind}, {counts})")
    return [str(args.out)]


def cmd_search(args: argparse.Namespace) -> list[str]:
    graph = _load_or_build_graph(args)
    space = walk.build_arc_space(graph)
    init_set = _parse_init(args.init)
    steps = args.steps
    if steps is None:
        steps = search.default_horizon(graph, restricted=True)
    config = search.SearchConfig(
        generation=graph.generation,
        marked=args.marked,
        steps=steps,
        init_set=init_set,
        record_every=args.record_every,
    )
    trace = search.evolve_and_trace(config, space=space)
    io.write_trace(trace, args.trace)
    outputs = [str(args.trace)]
    peak = search.find_peak(trace, search.Channel.CONDITIONAL)
    print(
        f"marked={args.marked} steps={steps} "
        f"peak: t_p={peak.t_p} p={peak.p_at_peak:.6f} [{peak.channel.value}]"
    )
    if args.trials:
        stats = search.restricted_search_trials(
            space, args.marked, peak.t_p, args.trials,
            seed=args.seed, init_set=init_set,
        )
        hit_rate = (
            stats.marked_hits_first / stats.first_projection_successes
            if stats.first_projection_successes
            else float("nan")
        )
        print(
            f"trials={args.trials}: hit rate {hit_rate:.4f} "
            f"(exact conditional {stats.exact_conditional:.4f}, "
            f"projection prob {stats.exact_success_prob:.4f})"
        )
    return outputs


def _sweep_rows(
    result: search.SweepResult, graph: graphs.ApollonianNetwork, channel: search.Channel
) -> list[io.SummaryRow]:
    rows = []
    for label, trace in result.groups.items():
        generation = None
        n_nodes_group = len(result.group_members[label])
        if label.startswith("gen"):
            generation = int(label[3:])
            n_nodes_group = len(graph.nodes_of_generation(generation))
        elif label == "last":
            generation = graph.generation
            n_nodes_group = len(graph.last_generation_nodes())
        try:
            peak = search.find_peak(trace, channel)
        except ParameterError:
            continue
        rows.append(
            io.SummaryRow(
                group=label,
                generation=generation,
                n_last=n_nodes_group,
                t_p=peak.t_p,
                two_sqrt_n_last=2.0 * math.sqrt(n_nodes_group),
                p_bar=peak.p_at_peak,
            )
        )
    return rows


def cmd_sweep(args: argparse.Namespace) -> list[str]:
    graph = _load_or_build_graph(args)
    space = walk.build_arc_space(graph)
    channel = search.Channel(args.channel)
    result = search.sweep(
        graph.generation,
        marked_set=search.MarkedSet(args.marked_set),
        init_set=_parse_init(args.init),
        steps=args.steps,
        group_by_generation=args.group_by_generation,
        sample_per_group=args.sample,
        seed=args.seed,
        workers=args.workers,
        space=space,
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = []
    for label, trace in result.groups.items():
        trace_path = out_dir / f"trace_{label}.csv"
        io.write_trace(trace, trace_path)
        outputs.append(str(trace_path))
    rows = _sweep_rows(result, graph, channel)
    summary_path = out_dir / "summary.json"
    io.write_summary(rows, channel.value, summary_path)
    outputs.append(str(summary_path))
    text_path = out_dir / "summary.txt"
    text_path.write_text(io.summary_text(rows, channel.value))
    outputs.append(str(text_path))
    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    sys.stdout.write(io.summary_text(rows, channel.value))
    return outputs


def cmd_spectrum(args: argparse.Namespace) -> list[str]:
    graph = _load_or_build_graph(args)
    space = walk.build_arc_space(graph)
    matrix = spectral.dense_step_matrix(space, walk.CoinSpec())
    audit = {}
    if graph.generation >= 1:
        audit["restricted_start"] = walk.initial_state(
            space, graph.last_generation_nodes()
        )
    report = spectral.eigen_analysis(
        matrix, walk.full_uniform_state(space), audit_states=audit
    )
    marked_set = None if args.marked is None else [args.marked]
    fact1 = spectral.verify_fact1(
        space, marked_set=marked_set, probes=args.probes, seed=args.seed
    )
    doc = {
        "kind": "spectral_report",
        "generation": graph.generation,
        "n_arcs": space.n_arcs,
        "sigma": report.sigma,
        "plus_one_dim": report.plus_one_dim,
        "degenerate_identity": report.degenerate_identity,
        "start_plus_one_residual": report.start_plus_one_residual,
        "start_overlap_plus_one": report.start_overlap_plus_one,
        "audit_overlaps": {
            name: {"plus_one_residual": residual, "overlap_plus_one": overlap}
            for name, (residual, overlap) in (report.audit_overlaps or {}).items()
        },
        "phase_multiplicities": [
            [phase, count] for phase, count in report.phase_multiplicities
        ],
        "invariance_checks": [
            {
                "marked": r.marked,
                "residual_start_in_xprime": r.residual_start_in_xprime,
                "residual_target_in_xprime": r.residual_target_in_xprime,
                "residual_closure_max": r.residual_closure_max,
                "overlap_plus_one": r.overlap_plus_one,
                "overlap_xprime": r.overlap_xprime,
                "passed": r.passed,
            }
            for r in fact1
        ],
    }
    Path(args.out).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    n_pass = sum(r.passed for r in fact1)
    print(
        f"sigma={report.sigma:.6e} plus_one_dim={report.plus_one_dim} "
        f"invariance checks passed {n_pass}/{len(fact1)}"
    )
    return [str(args.out)]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="apwalk",
        description="coined quantum-walk search on Apollonian networks",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="build a network document")
    p_gen.add_argument("--generation", type=int, default=None)
    p_gen.add_argument(
        "--kind",
        choices=[graphs.KIND_DETERMINISTIC, graphs.KIND_RANDOM, "random"],
        default=graphs.KIND_DETERMINISTIC,
    )
    p_gen.add_argument("--iterations", type=int, default=None)
    p_gen.add_argument("--subdivisions", type=int, default=None)
    p_gen.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(func=cmd_generate)

    p_search = sub.add_parser("search", help="trace one marked-node walk")
    p_search.add_argument("--graph", default=None)
    p_search.add_argument("--generation", type=int, default=None)
    p_search.add_argument("--marked", type=int, required=True)
    p_search.add_argument(
        "--init", choices=[e.value for e in search.InitSet],
        default=search.InitSet.FULL.value,
    )
    p_search.add_argument("--steps", type=int, default=None)
    p_search.add_argument("--record-every", type=int, default=1)
    p_search.add_argument("--trials", type=int, default=0,
                          help="also sample this many projective runs at the peak")
    p_search.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_search.add_argument("--trace", required=True)
    p_search.set_defaults(func=cmd_search)

    p_sweep = sub.add_parser("sweep", help="average over marked candidates")
    p_sweep.add_argument("--graph", default=None)
    p_sweep.add_argument("--generation", type=int, default=None)
    p_sweep.add_argument(
        "--marked-set", choices=[e.value for e in search.MarkedSet],
        default=search.MarkedSet.LAST_GENERATION.value,
    )
    p_sweep.add_argument(
        "--init", choices=[e.value for e in search.InitSet],
        default=search.InitSet.FULL.value,
    )
    p_sweep.add_argument("--steps", type=int, default=None)
    p_sweep.add_argument("--group-by-generation", action="store_true")
    p_sweep.add_argument("--sample", type=int, default=None,
                         help="random subsample size per group")
    p_sweep.add_argument(
        "--channel", choices=[e.value for e in search.Channel],
        default=search.Channel.CONDITIONAL.value,
    )
    p_sweep.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_sweep.add_argument("--workers", type=int, default=1)
    p_sweep.add_argument("--out", required=True)
    p_sweep.set_defaults(func=cmd_sweep)

    p_spec = sub.add_parser("spectrum", help="dense spectral report")
    p_spec.add_argument("--graph", default=None)
    p_spec.add_argument("--generation", type=int, default=None)
    p_spec.add_argument("--marked", type=int, default=None,
                        help="restrict invariance checks to this node")
    p_spec.add_argument("--probes", type=int, default=10)
    p_spec.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_spec.add_argument("--out", required=True)
    p_spec.set_defaults(func=cmd_spectrum)

    return parser


def _manifest_path(args: argparse.Namespace, outputs: list[str]) -> Path:
    if args.command == "sweep":
        return Path(args.out) / "manifest.json"
    primary = Path(outputs[0])
    return primary.with_name(primary.stem + ".manifest.json")


def _manifest_parameters(args: argparse.Namespace) -> dict:
    skip = {"func", "command"}
    return {
        key: value
        for key, value in sorted(vars(args).items())
        if key not in skip
    }


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.monotonic()
    try:
        outputs = args.func(args)
        manifest = _manifest_path(args, outputs)
        io.write_manifest(
            manifest,
            command=args.command,
            parameters=_manifest_parameters(args),
            seed=getattr(args, "seed", None),
            outputs=outputs,
            duration_seconds=time.monotonic() - started,
            version=__version__,
        )
    except (ParameterError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as exc:
        print(f"capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except ContractViolation as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001 -- map anything unexpected to 4
        print(f"unexpected failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
