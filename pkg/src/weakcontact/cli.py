"""Command-line entry point: ``weakcontact {list,classify,verify,soliton}``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from . import gallery
from .contact import classify, construct_from_killing
from .errors import DegenerateStructure, InvalidConfig, UnknownManifold
from .manifold import SamplePlan, sample_points
from .report import render_report
from .runner import SUITES, RunConfig, SolitonSpec, default_seed, load_config, resolve_suites, run_suite

__all__ = ["main", "build_parser"]

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_DEGENERATE = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    """argparse raises instead of exiting so usage errors map to exit code 2 uniformly."""

    def error(self, message):
        raise InvalidConfig(f"{self.prog}: {message}")


def _common(sp):
    sp.add_argument("--manifold", help="gallery entry name (see `list`)")
    sp.add_argument("--param", action="append", default=None, metavar="K=V", help="manifold parameter, repeatable")
    sp.add_argument("--config", metavar="FILE", help="JSON file with RunConfig fields; flags override it")
    sp.add_argument("--samples", type=int, help="number of sample points (default 100)")
    sp.add_argument("--seed", type=int, help="sampling seed (fallback: $WEAKCONTACT_SEED, then 0)")
    sp.add_argument("--margin", type=float, help="fraction of the chart box trimmed before sampling")
    sp.add_argument("--tol", type=float, help="residual tolerance (default 1e-7)")
    sp.add_argument("--jet-order", type=int, choices=(2, 3), help="jet truncation order")
    sp.add_argument("--out", metavar="FILE", help="write the report here instead of stdout")
    sp.add_argument("--format", choices=("text", "json"), help="report format (default text)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="weakcontact", description="Verify weak contact metric identities on sampled charts.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    sub.add_parser("list", help="list gallery manifolds")

    sp = sub.add_parser("classify", help="report the structure ladder level")
    _common(sp)

    sp = sub.add_parser("verify", help="run identity suites and emit a report")
    _common(sp)
    sp.add_argument("--suite", action="append", default=None, help=f"one of {', '.join(SUITES)} or all; repeatable or comma separated")

    sp = sub.add_parser("soliton", help="evaluate the generalized Ricci soliton suites")
    _common(sp)
    sp.add_argument("--c1", type=float, default=None)
    sp.add_argument("--c2", type=float, default=None)
    sp.add_argument("--lambda", dest="lam", type=float, default=None)
    sp.add_argument("--potential", metavar="EXPR", help="closed-form potential over chart coordinates")
    sp.add_argument("--potential2", metavar="EXPR", help="second potential (two-potential form)")
    return parser


def _config(args) -> RunConfig:
    base: dict = {}
    if args.config:
        try:
            with open(args.config) as fh:
                base = json.load(fh)
        except OSError as exc:
            raise InvalidConfig(f"cannot read config {args.config}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise InvalidConfig(f"config {args.config} is not valid JSON: {exc}") from None
    has_seed = isinstance(base, dict) and "seed" in (base.get("sampling") or {})
    cfg = load_config(base)
    if args.manifold and args.manifold != cfg.manifold:
        cfg.manifold = args.manifold
        cfg.params = {}
    if args.param:
        try:
            cfg.params = {**cfg.params, **gallery.parse_params(args.param)}
        except ValueError as exc:
            raise InvalidConfig(str(exc)) from None
    if not args.config and not args.manifold:
        raise InvalidConfig("--manifold is required (or give it in --config)")
    plan = cfg.sampling
    seed = args.seed if args.seed is not None else (plan.seed if has_seed else default_seed())
    try:
        cfg.sampling = SamplePlan(
            count=args.samples if args.samples is not None else plan.count,
            seed=seed,
            margin=args.margin if args.margin is not None else plan.margin,
        )
    except ValueError as exc:
        raise InvalidConfig(str(exc)) from None
    if args.tol is not None:
        cfg.tolerance = args.tol
    if args.jet_order is not None:
        cfg.jet_order = args.jet_order
    if args.out:
        cfg.output = args.out
    if getattr(args, "suite", None):
        cfg.suites = resolve_suites(",".join(args.suite))
    if args.command == "soliton":
        spec = cfg.soliton or SolitonSpec()
        for flag, attr in (("c1", "c1"), ("c2", "c2"), ("lam", "lam"), ("potential", "potential"), ("potential2", "potential2")):
            v = getattr(args, flag)
            if v is not None:
                spec = replace(spec, **{attr: v})
        cfg.soliton = spec
        if not getattr(args, "suite", None) and "suites" not in base:
            cfg.suites = ("soliton", "lemmas")
    if args.format:
        cfg.format = args.format
    return cfg.validate()


def _emit(text: str, path: str | None):
    if path:
        try:
            with open(path, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise InvalidConfig(f"cannot write report to {path}: {exc.strerror}") from None
    else:
        print(text)


def _list() -> int:
    for name, factory in sorted(gallery.REGISTRY.items()):
        entry = factory()
        print(f"{name:14s} {entry.description}  params={entry.params}")
    return EXIT_PASS


def _classify(cfg: RunConfig) -> int:
    entry = gallery.get(cfg.manifold, cfg.params)
    S = construct_from_killing(entry.chart, entry.xi, order=cfg.jet_order)
    pts = sample_points(entry.chart, replace(cfg.sampling, count=min(cfg.sampling.count, 20)))
    result = classify(S, pts, cfg.tolerance)
    text = result.describe()
    if cfg.format == "json":
        text = json.dumps(
            {"manifold": cfg.manifold, "params": entry.params, "level": result.level.label,
             "classical": result.classical, "normal": result.normal},
            sort_keys=True,
        )
    _emit(text, cfg.output)
    return EXIT_PASS


def _verify(cfg: RunConfig) -> int:
    report = run_suite(cfg)
    _emit(render_report(report, cfg.format), cfg.output)
    return EXIT_PASS if report.all_passed else EXIT_FAIL


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "list":
            return _list()
        cfg = _config(args)
        if args.command == "classify":
            return _classify(cfg)
        return _verify(cfg)
    except DegenerateStructure as exc:
        print(f"error: degenerate structure ({exc.reason}): {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except UnknownManifold as exc:
        print(f"error: {exc.args[0] if exc.args else exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvalidConfig, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
