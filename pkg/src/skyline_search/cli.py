"""Command-line entry point: run, layers, verify, gen, validate."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from .engine import RunConfig, Termination, run
from .frontier import pareto_layers
from .generator import GenParams, generate_random_instance
from .instance import InstanceError, format_cost, validate_instance
from .instance_io import emit_instance, emit_trace, load_instance, parse_instance
from .oracle import OracleRefusal, annotate_h_star, enumerate_feasible, verify_run

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NO_SOLUTIONS = 2
EXIT_STEP_LIMIT = 3


def _path_text(instance, path: Sequence[int]) -> str:
    if not path:
        return instance.node_names[instance.source]
    nodes = [instance.node_names[instance.edges[path[0]].src]]
    nodes += [instance.node_names[instance.edges[e].dst] for e in path]
    return "->".join(nodes)


def _seed_range(text: str) -> range:
    lo, sep, hi = text.partition("..")
    try:
        start = int(lo)
        stop = int(hi) if sep else start
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B, got {text!r}") from None
    if stop < start:
        raise argparse.ArgumentTypeError(f"empty seed range {text!r}")
    return range(start, stop + 1)


def cmd_run(args: argparse.Namespace) -> int:
    instance = load_instance(args.instance)
    result = run(instance, RunConfig(cert_period=args.cert_period, step_limit=args.step_limit))
    if args.h_star:
        annotate_h_star(result)
    if args.trace:
        with open(args.trace, "w", encoding="utf-8", newline="") as sink:
            emit_trace(result, sink, args.trace_format)
    print(f"{'#':>3}  {'signature':<16} {'cost':<20} {'step':>4}  path")
    for i, s in enumerate(result.solutions, start=1):
        print(
            f"{i:>3}  {instance.describe_signature(s.sig):<16} {format_cost(instance, s.cost):<20} "
            f"{s.discovered_at_step:>4}  {_path_text(instance, s.path)}"
        )
    print(f"termination: {result.termination.value} after {result.steps} steps")
    if not result.solutions:
        return EXIT_NO_SOLUTIONS
    if result.termination is Termination.STEP_LIMIT:
        return EXIT_STEP_LIMIT
    return EXIT_OK


def cmd_layers(args: argparse.Namespace) -> int:
    instance = load_instance(args.instance)
    paths = enumerate_feasible(instance).feasible_paths
    labels = {id(p): f"p{i}" for i, p in enumerate(paths, start=1)}
    print(f"{len(paths)} feasible paths")
    for p in paths:
        print(
            f"  {labels[id(p)]}  {_path_text(instance, p.path):<24} "
            f"{format_cost(instance, p.cost):<20} @{instance.describe_signature(p.sig)}"
        )
    for k, layer in enumerate(pareto_layers(paths), start=1):
        print(f"layer {k}: {{{', '.join(labels[id(p)] for p in sorted(layer, key=lambda p: labels[id(p)]))}}}")
    return EXIT_OK


def _verify_one(instance, label: str) -> bool:
    verification = verify_run(instance)
    for report in verification.reports:
        status = "n/a " if not report.applicable else ("pass" if report.passed else "FAIL")
        print(f"{label}  {status}  {report.name}")
        for failure in report.failures:
            print(f"{label}        {failure}")
    return verification.passed


def cmd_verify(args: argparse.Namespace) -> int:
    if args.instance is None and args.seeds is None:
        print("error: give an instance, --seeds, or both", file=sys.stderr)
        return EXIT_ERROR
    ok = True
    if args.instance is not None:
        ok &= _verify_one(load_instance(args.instance), str(args.instance))
    for seed in args.seeds or ():
        ok &= _verify_one(generate_random_instance(seed, _gen_params(args)), f"seed {seed}")
    print("all checks passed" if ok else "some checks failed")
    return EXIT_OK if ok else EXIT_ERROR


def _gen_params(args: argparse.Namespace) -> GenParams:
    return GenParams(
        nodes=args.nodes,
        dims=args.dims,
        grid_size=args.grid_size,
        attributes=args.attributes,
        edge_probability=args.edge_probability,
        attribute_switch=not args.no_attribute_switch,
        table_dimension=args.table_dimension,
    )


def cmd_gen(args: argparse.Namespace) -> int:
    text = emit_instance(generate_random_instance(args.seed, _gen_params(args)))
    if args.output == "-":
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text, encoding="utf-8")
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    path = Path(args.instance)
    instance = load_instance(args.instance, validate=False) if not path.exists() else parse_instance(
        path.read_text(encoding="utf-8"), validate=False
    )
    report = validate_instance(instance)
    print(report)
    for dim, value in sorted(report.computed_delta_min.items()):
        shown = "none" if value is None else value
        print(f"computed minimum increment {instance.dimension_names[dim]}: {shown}")
    return EXIT_OK if report.ok else EXIT_ERROR


def _add_gen_options(p: argparse.ArgumentParser) -> None:
    d = GenParams()
    p.add_argument("--nodes", type=int, default=d.nodes)
    p.add_argument("--dims", type=int, default=d.dims)
    p.add_argument("--grid-size", type=int, default=d.grid_size)
    p.add_argument("--attributes", type=int, default=d.attributes)
    p.add_argument("--edge-probability", type=float, default=d.edge_probability)
    p.add_argument("--no-attribute-switch", action="store_true")
    p.add_argument("--table-dimension", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skyline-search", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="search an instance and print its solutions")
    p.add_argument("instance", help="instance file, or the name of a bundled fixture")
    p.add_argument("--trace", help="write the per-step trace to this file")
    p.add_argument("--trace-format", choices=("csv", "structured"), default="csv")
    p.add_argument("--cert-period", type=int, default=1)
    p.add_argument("--step-limit", type=int)
    p.add_argument("--h-star", action="store_true", help="annotate the trace with the potential floor")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("layers", help="Pareto layers of all feasible complete paths")
    p.add_argument("instance")
    p.set_defaults(func=cmd_layers)

    p = sub.add_parser("verify", help="run the engine and every oracle check")
    p.add_argument("instance", nargs="?")
    p.add_argument("--seeds", type=_seed_range, help="inclusive seed range A..B of random instances")
    _add_gen_options(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="write a seeded random instance")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--output", default="-")
    _add_gen_options(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("validate", help="check an instance and print the report")
    p.add_argument("instance")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InstanceError, OracleRefusal, OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
