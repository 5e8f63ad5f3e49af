"""Command line interface.

Subcommands: ``suite`` runs the verification suites and writes the JSON
report (exit status 0 iff every check passes); ``normalform``,
``coproduct``, ``antipode``, ``membership`` and ``limit`` are one-shot
expression tools.  Flags override the JSON config file.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .intervals import ConfigError, Grid
from .ncalg import CLASSICAL, UH, UHT, UQ, UQT, AlgebraSpec, normal_form
from .hopf import antipode, coproduct
from .classical import limit_q1
from .qdp import membership
from .parser import ParseError, parse_expr
from .suites import SUITE_NAMES, RunConfig, report_to_json, run_suite


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON configuration file")
    p.add_argument("--grid", help="comma separated rational breakpoints, e.g. 0,1/2,1")
    p.add_argument("--presentation",
                   choices=[UQ, UQT, UH, UHT, CLASSICAL])
    p.add_argument("--euler-variant", dest="euler_variant")
    p.add_argument("--serre-variant", dest="serre_variant")
    p.add_argument("--order", type=int, help="series truncation order")
    p.add_argument("--depth", type=int, help="membership depth")
    p.add_argument("--fuel", type=int, help="rewrite fuel budget")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output path (JSON)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="intquant",
        description="exact engine for interval-indexed quantum groups")
    sub = ap.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("suite", help="run verification suites")
    _add_common(ps)
    ps.add_argument("--suite", action="append", dest="suites",
                    help=f"suite name (repeatable); one of {', '.join(SUITE_NAMES)}")

    for name, desc in (("normalform", "PBW normal form of an expression"),
                       ("coproduct", "coproduct of an expression"),
                       ("antipode", "antipode of an expression"),
                       ("membership", "Drinfeld-subalgebra membership report"),
                       ("limit", "q = 1 specialization")):
        p = sub.add_parser(name, help=desc)
        _add_common(p)
        p.add_argument("--expr", required=True, help="expression text")
        p.add_argument("--json", action="store_true", help="emit JSON")
    return ap


def load_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        with open(args.config) as fh:
            cfg = RunConfig.from_json(json.load(fh))
    if args.grid:
        cfg.grid = [s.strip() for s in args.grid.split(",")]
    for attr in ("presentation", "euler_variant", "serre_variant", "order",
                 "depth", "fuel", "seed", "out"):
        v = getattr(args, attr, None)
        if v is not None:
            setattr(cfg, attr, v)
    if getattr(args, "suites", None):
        cfg.suites = args.suites
    return cfg


def _spec_for(cfg: RunConfig) -> AlgebraSpec:
    return AlgebraSpec(cfg.presentation, cfg.make_grid(),
                       euler_variant=cfg.euler_variant,
                       serre_variant=cfg.serre_variant, order=cfg.order,
                       fuel=cfg.fuel)


def _emit(payload, path) -> None:
    text = payload if isinstance(payload, str) else json.dumps(payload, indent=2,
                                                               default=str)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        if args.command == "suite":
            report = run_suite(cfg)
            _emit(report_to_json(report), cfg.out)
            return 0 if report["summary"]["fail"] == 0 else 1
        spec = _spec_for(cfg)
        expr = parse_expr(args.expr, spec)
        if args.command == "normalform":
            nf = normal_form(expr, spec)
            _emit({"expr": args.expr, "normal_form": nf.text()}
                  if args.json else nf.text(), cfg.out)
        elif args.command == "coproduct":
            d = coproduct(expr, spec)
            _emit({"expr": args.expr, "coproduct": d.text()}
                  if args.json else d.text(), cfg.out)
        elif args.command == "antipode":
            s = antipode(expr, spec)
            _emit({"expr": args.expr, "antipode": s.text()}
                  if args.json else s.text(), cfg.out)
        elif args.command == "membership":
            rep = membership(expr, cfg.depth, spec)
            _emit(rep.to_json() if args.json else
                  f"{'PASS' if rep.passed else 'FAIL'} up to depth {cfg.depth}: "
                  + json.dumps(rep.to_json(), default=str), cfg.out)
            return 0 if rep.passed else 1
        elif args.command == "limit":
            if spec.presentation == UQ:
                out = limit_q1(expr, spec)
            else:
                out = limit_q1(expr, spec)
            _emit({"expr": args.expr, "limit_q1": out.text()}
                  if args.json else out.text(), cfg.out)
        return 0
    except (ConfigError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
