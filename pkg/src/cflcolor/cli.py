"""Command line entry point: ``cflcolor <subcommand> ...``.

Exit codes: 0 success, 2 configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import connectivity, harness, solver, wireless
from .graphs import format_graph, read_graph

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 2, 3


class ConfigError(Exception):
    pass


def _powers(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(t) for t in text.replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad power list {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("power list is empty")
    return vals


def _dump(obj, out: str | None) -> None:
    text = json.dumps(obj, indent=2) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _palette_for(g, colors: int | None, budget: int) -> int:
    if colors is not None:
        return colors
    if g.n_vertices == 0:
        return 1
    chi = connectivity.chromatic_number(g, budget=budget)
    return chi.value if chi.exact else chi.upper


def _write_instance(g, s, nodes, d: int, out: str | None) -> None:
    text = format_graph(g, s, d)
    if not out:
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="ascii") as fh:
        fh.write(text)
    sidecar = {
        "n_colors": d,
        "nodes": [
            {"id": k, "x": nd.x, "y": nd.y, "z": nd.z, "tx_power_dbm": nd.tx_power, "threshold_dbm": nd.threshold}
            for k, nd in enumerate(nodes)
        ],
    }
    with open(out + ".nodes.json", "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2)
        fh.write("\n")


def cmd_generate(args) -> int:
    cfg = wireless.DbmConfig(
        intensity=args.lam,
        area_side=args.area_side,
        power_set=args.powers,
        detection_threshold=args.threshold_dbm,
        frequency_ghz=args.freq_ghz,
        seed=args.seed,
    )
    g, s, nodes = wireless.generate_dbm(cfg)
    _write_instance(g, s, nodes, _palette_for(g, args.colors, args.budget), args.out)
    return EXIT_OK


def cmd_ingest(args) -> int:
    nodes = wireless.ingest_xyz(args.xyz, args.powers, args.threshold_dbm, args.seed)
    g, s = wireless.build_interference_graph(nodes, wireless.ExponentPathLoss(args.alpha), args.mode)
    _write_instance(g, s, nodes, _palette_for(g, args.colors, args.budget), args.out)
    return EXIT_OK


def cmd_analyze(args) -> int:
    g, s, d = read_graph(args.graph)
    if args.colors is not None:
        d = args.colors
    _dump(connectivity.analyze(g, s, d, args.budget), args.out)
    return EXIT_OK


def cmd_solve(args) -> int:
    g, s, d = read_graph(args.graph)
    if args.colors is not None:
        d = args.colors
    if g.n_vertices == 0:
        raise ConfigError("graph has no vertices")
    params = solver.SolverParams(d, args.a, args.b)
    outcome = solver.run(s, params, args.seed, args.max_rounds, graph=g)
    doc = outcome.to_dict()
    doc["n_colors"] = d
    doc["gamma"] = solver.gamma(params)
    _dump(doc, args.out)
    return EXIT_OK


def cmd_experiment(args) -> int:
    dbm = wireless.DbmConfig(
        intensity=args.lam,
        area_side=args.area_side,
        power_set=args.powers,
        detection_threshold=args.threshold_dbm if args.threshold_dbm is not None else -25.0,
        frequency_ghz=args.freq_ghz,
    )
    path = args.graph if args.source == "file" else args.xyz
    cfg = harness.ExperimentConfig(
        source=args.source,
        dbm=dbm,
        path=path,
        alpha=args.alpha,
        threshold=args.threshold_dbm if args.threshold_dbm is not None else -45.0,
        powers=args.powers,
        mode=args.mode,
        trials=args.trials,
        max_rounds=args.max_rounds,
        palette=args.palette,
        a=args.a,
        b=args.b,
        seed=args.seed,
        full_sensing=args.full_sensing,
        chromatic_budget=args.budget,
    )
    result = harness.run_experiment(cfg, workers=args.workers)
    if args.out:
        harness.emit(result, args.format, args.out)
    elif args.format == "csv":
        sys.stdout.write(harness.records_to_csv(result.records))
    else:
        sys.stdout.write(harness.result_to_json(result))
    return EXIT_OK


def cmd_bounds(args) -> int:
    if args.gamma is not None:
        g = args.gamma
    elif args.d is not None:
        g = solver.gamma(solver.SolverParams(args.d, args.a, args.b))
    else:
        raise ConfigError("give --gamma, or --d (with optional --a/--b)")
    inputs = harness.BoundInputs(args.n, g, args.epsilon)
    _dump(
        {
            "n": args.n,
            "gamma": g,
            "epsilon": args.epsilon,
            "theorem1": harness.theorem1_bound(inputs).to_dict(),
            "corollary2": harness.corollary2_bound(inputs).to_dict(),
        },
        args.out,
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cflcolor", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, colors=True):
        sp.add_argument("--out", help="output path (default: stdout)")
        sp.add_argument("--budget", type=int, default=connectivity.DEFAULT_NODE_BUDGET,
                        help="branch-and-bound node budget for chromatic numbers")
        if colors:
            sp.add_argument("--colors", type=int, help="palette size (default: from file / chromatic number)")

    def radio(sp, threshold):
        sp.add_argument("--threshold-dbm", type=float, default=threshold)
        sp.add_argument("--powers", type=_powers, default=wireless.DEFAULT_POWERS, help="comma-separated dBm list")
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("generate", help="sample a Directed Boolean Model instance")
    sp.add_argument("--lambda", dest="lam", type=float, default=0.5)
    sp.add_argument("--area-side", type=float, default=10.0)
    sp.add_argument("--freq-ghz", type=float, default=2.412)
    radio(sp, -25.0)
    common(sp)
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("ingest", help="build an interference graph from x y z coordinates")
    sp.add_argument("--xyz", required=True)
    sp.add_argument("--alpha", type=float, default=4.3)
    sp.add_argument("--mode", choices=("channel", "tdma"), default="channel")
    radio(sp, -45.0)
    common(sp)
    sp.set_defaults(func=cmd_ingest)

    sp = sub.add_parser("analyze", help="report convergence conditions for a graph file")
    sp.add_argument("--graph", required=True)
    common(sp)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("solve", help="run the solver once on a graph file")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--a", type=float, default=1.0)
    sp.add_argument("--b", type=float, default=0.1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-rounds", type=int, default=100_000)
    common(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("experiment", help="batch of seeded solver trials")
    sp.add_argument("--source", choices=("dbm", "file", "xyz", "layout"), default="dbm")
    sp.add_argument("--graph", help="graph file for --source file")
    sp.add_argument("--xyz", help="coordinate file for --source xyz")
    sp.add_argument("--lambda", dest="lam", type=float, default=0.5)
    sp.add_argument("--area-side", type=float, default=10.0)
    sp.add_argument("--freq-ghz", type=float, default=2.412)
    sp.add_argument("--alpha", type=float, default=4.3)
    sp.add_argument("--mode", choices=("channel", "tdma"), default="channel")
    sp.add_argument("--threshold-dbm", type=float, default=None,
                    help="detection threshold (default -25 for dbm, -45 otherwise)")
    sp.add_argument("--powers", type=_powers, default=wireless.DEFAULT_POWERS)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--max-rounds", type=int, default=100_000)
    sp.add_argument("--palette", default="chi", help="'chi', 'chi+K' or a fixed palette size")
    sp.add_argument("--a", type=float, default=1.0)
    sp.add_argument("--b", type=float, default=0.1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--full-sensing", action="store_true", help="replace sensing by the full constraint graph")
    sp.add_argument("--format", choices=("csv", "json"), default="json")
    sp.add_argument("--workers", type=int, default=1)
    common(sp, colors=False)
    sp.set_defaults(func=cmd_experiment)

    sp = sub.add_parser("bounds", help="theoretical iteration bounds")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--gamma", type=float)
    sp.add_argument("--a", type=float, default=1.0)
    sp.add_argument("--b", type=float, default=0.1)
    sp.add_argument("--d", type=int)
    sp.add_argument("--epsilon", type=float, default=harness.DEFAULT_EPSILON)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_bounds)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG
    try:
        return args.func(args)
    except OSError as exc:
        print(f"cflcolor: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, ValueError, IndexError) as exc:
        print(f"cflcolor: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
