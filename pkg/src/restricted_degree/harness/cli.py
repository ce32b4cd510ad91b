"""Command line entry point.

Subcommands::

    simulate --config FILE
    theory --model NAME [--beta B | --lambda L | --m-arity M] --alpha A --dmax D --out FILE
           [--q-shift S] [--empirical-c PATH]
    compare --run DIR --theory FILE --out FILE [--tv-dmax D]
    check-conditions --run DIR --theory FILE [--out FILE]

Exit codes: 0 success, 2 configuration error, 3 invariant violation.
"""

from __future__ import annotations

import argparse
import logging
import sys

from ..errors import ConfigError, EstimationError, InvariantViolation
from ..models import params_from_dict
from . import jsonio
from .config import load_config
from .diagnostics import check_conditions
from .report import compare_report, format_table
from .runner import run_experiment
from .theory_build import build_theory

log = logging.getLogger("restricted_degree")


def _model_from_args(args):
    spec = {"name": args.model}
    if args.model == "port":
        spec["beta"] = 0.0 if args.beta is None else args.beta
    elif args.model in ("indep", "frozen"):
        spec["lambda"] = 1.0 if args.lam is None else args.lam
    elif args.model == "multitree":
        if args.m_arity is None:
            raise ConfigError("multitree needs --m-arity")
        spec["M"] = args.m_arity
    return params_from_dict(spec)


def cmd_simulate(args):
    config = load_config(args.config)
    path = run_experiment(config, workers=args.workers)
    print(path)


def cmd_theory(args):
    params = _model_from_args(args)
    doc = build_theory(params, args.alpha, args.dmax, q_shift=args.q_shift,
                       empirical=args.empirical_c, min_count=args.min_count)
    jsonio.dump(doc, args.out)
    print(f"gamma* = {doc['gamma_star']}, condition6_ok = {doc['condition6_ok']}")


def cmd_compare(args):
    report = compare_report(args.run, args.theory, out=args.out, tv_dmax=args.tv_dmax)
    sys.stdout.write(format_table(report))


def cmd_check(args):
    diag = check_conditions(args.run, args.theory)
    text = jsonio.dumps(diag)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def build_parser():
    parser = argparse.ArgumentParser(prog="restricted-degree", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run an experiment described by a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--workers", type=int, default=None, help="override the config's worker count")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("theory", help="compute the limit distribution x_d")
    p.add_argument("--model", required=True, choices=["port", "indep", "multitree", "frozen"])
    p.add_argument("--beta", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--m-arity", type=int)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--dmax", type=int, required=True)
    p.add_argument("--q-shift", type=int, default=0,
                   help="law of the new selected vertex degree = new vertex degree + shift")
    p.add_argument("--empirical-c", help="run directory or CSV for plug-in mode")
    p.add_argument("--min-count", type=int, default=25)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("compare", help="compare a run with a theory file")
    p.add_argument("--run", required=True)
    p.add_argument("--theory", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--tv-dmax", type=int)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("check-conditions", help="finite-n condition diagnostics")
    p.add_argument("--run", required=True)
    p.add_argument("--theory")
    p.add_argument("--out")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (ConfigError, EstimationError, FileNotFoundError) as exc:
        log.error("%s", exc)
        return 2
    except InvariantViolation as exc:
        log.error("%s", exc)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
