"""Command-line entry point.

Subcommands::

    subtensor gen --n N --p P [--seed S] [--backend dense] --output FILE
    subtensor solve --algo {igpt,brute,local} --n N --k K --p P [--seed S]
    subtensor theory --quantity {e-max,ratio,tail,psi,lemma-checks} ...
    subtensor experiment --name NAME [--config FILE] [--set KEY=VALUE ...]

Results go to stdout as JSON.  Exit status is 0 on success, 1 on a usage
error and 2 when a budget or parameter check fails.  The experiment output
directory defaults to ``$LAST_OUTPUT_DIR`` (or ``./results``).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import experiments as ex
from .algorithms import brute_force_max, igpt, local_search
from .errors import SubtensorError
from .rtensor import generate_tensor, write_dump
from .theory import (
    BoundReport,
    ProblemParams,
    bivariate_tail_upper,
    build_covariance_model,
    counting_tail_report,
    e_max,
    gaussian_tail_bounds,
    igpt_guarantee_ratio,
    lemma_checks,
    ogp_exponent_psi,
)

OUTPUT_ENV = "LAST_OUTPUT_DIR"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o).__name__)


def _clean(o):
    # JSON has no inf/nan; emit them as strings
    if isinstance(o, float) and not math.isfinite(o):
        return repr(o)
    if isinstance(o, dict):
        return {k: _clean(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_clean(v) for v in o]
    return o


def _emit(obj, out) -> None:
    out.write(json.dumps(_clean(obj), indent=2, sort_keys=True, default=_json_default) + "\n")


def _reports(rs: list[BoundReport]) -> list[dict]:
    return [r.to_dict() for r in rs]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="subtensor", description="Large average subtensor toolkit.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)

    g = sub.add_parser("gen", help="write a tensor dump")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--p", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--output", required=True)

    s = sub.add_parser("solve", help="run a solver on a fresh instance")
    s.add_argument("--algo", choices=["igpt", "brute", "local"], required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--backend", choices=["dense", "implicit", "auto"], default="auto")
    s.add_argument("--init-seed", type=int, default=None, help="local search start")

    t = sub.add_parser("theory", help="evaluate a theoretical quantity")
    t.add_argument("--quantity", choices=["e-max", "ratio", "tail", "psi", "lemma-checks"], required=True)
    t.add_argument("--n", type=int)
    t.add_argument("--k", type=int)
    t.add_argument("--p", type=int)
    t.add_argument("--x", type=float, help="univariate Gaussian tail point")
    t.add_argument("--rho", type=float, help="bivariate tail correlation")
    t.add_argument("--u", type=float, help="bivariate tail level")
    t.add_argument("--delta", type=float, help="counting-tail overlap deficit")
    t.add_argument("--gamma", type=float)
    t.add_argument("--m", type=int, default=2)
    t.add_argument("--nu1", type=float)
    t.add_argument("--nu2", type=float)
    t.add_argument("--c", type=float, default=0.0)
    t.add_argument("--eta-source", choices=["zero", "random"], default="zero")
    t.add_argument("--seed", type=int, default=0)

    e = sub.add_parser("experiment", help="run a Monte-Carlo experiment")
    e.add_argument("--name", choices=list(ex.EXPERIMENTS))
    e.add_argument("--config", help="flat 'key = value' file")
    e.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config key")
    e.add_argument("--threads", type=int, default=None)
    e.add_argument("--output", help="output directory")
    e.add_argument("--dump-config", action="store_true", help="print the effective config and exit")
    return parser


def _need(args, *names):
    missing = [n for n in names if getattr(args, n.replace("-", "_")) is None]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + m for m in missing))


def _cmd_gen(args, out):
    t = generate_tensor(args.n, args.p, seed=args.seed, backend="dense")
    write_dump(t, args.output)
    _emit({"output": str(args.output), "n": args.n, "p": args.p, "seed": args.seed}, out)


def _cmd_solve(args, out):
    if args.algo == "brute":
        t = generate_tensor(args.n, args.p, args.k, args.seed, "dense")
        res = brute_force_max(t, args.k)
    else:
        t = generate_tensor(args.n, args.p, args.k, args.seed, args.backend)
        if args.algo == "igpt":
            res = igpt(t, args.k)
        else:
            res = local_search(t, args.k, seed=args.init_seed if args.init_seed is not None else args.seed)
    d = res.to_dict()
    d.update(n=args.n, k=args.k, p=args.p, seed=args.seed, e_max=e_max(ProblemParams(args.n, args.k, args.p)))
    _emit(d, out)


def _cmd_theory(args, out):
    q = args.quantity
    if q == "e-max":
        _need(args, "n", "k", "p")
        _emit({"quantity": q, "n": args.n, "k": args.k, "p": args.p,
               "value": e_max(ProblemParams(args.n, args.k, args.p))}, out)
    elif q == "ratio":
        _need(args, "p")
        _emit({"quantity": q, "p": args.p, "value": igpt_guarantee_ratio(args.p)}, out)
    elif q == "tail":
        reports = []
        if args.x is not None:
            lo, up, exact = gaussian_tail_bounds(args.x)
            reports.append(BoundReport("gaussian_tail", {"x": args.x}, lo, up, exact))
        if args.rho is not None or args.u is not None:
            _need(args, "rho", "u")
            reports.append(BoundReport("bivariate_tail", {"rho": args.rho, "u": args.u},
                                       upper=bivariate_tail_upper(args.rho, args.u)))
        if args.delta is not None:
            _need(args, "n", "k", "gamma")
            reports.append(counting_tail_report(args.n, args.k, args.delta, args.gamma))
        if not reports:
            raise UsageError("tail needs --x, --rho/--u or --delta")
        _emit(_reports(reports), out)
    elif q == "psi":
        _need(args, "n", "k", "p", "gamma", "nu1", "nu2")
        val = ogp_exponent_psi(ProblemParams(args.n, args.k, args.p), args.m, args.gamma, args.nu1, args.nu2, args.c)
        _emit({"quantity": q, "n": args.n, "k": args.k, "p": args.p, "m": args.m, "gamma": args.gamma,
               "nu1": args.nu1, "nu2": args.nu2, "c": args.c, "value": val, "certified": val < 0}, out)
    else:
        _need(args, "p", "nu1", "nu2")
        model = build_covariance_model(args.m, args.p, args.nu1, args.nu2, args.eta_source, args.seed)
        _emit(_reports(lemma_checks(model)), out)


def _experiment_config(args) -> ex.ExperimentConfig:
    cfg = ex.load_config(args.config) if args.config else ex.ExperimentConfig()
    overrides = {}
    for item in args.set:
        if "=" not in item:
            raise UsageError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        overrides[k.strip()] = v.strip()
    if args.name:
        overrides["name"] = args.name
    return ex.apply_overrides(cfg, overrides)


def _cmd_experiment(args, out):
    cfg = _experiment_config(args)
    if args.dump_config:
        out.write(cfg.to_text())
        return
    if not args.name and not args.config:
        raise UsageError("experiment needs --name or --config")
    outdir = Path(args.output or os.environ.get(OUTPUT_ENV) or "results")
    _, summary = ex.run_experiment(cfg, outdir, args.threads)
    summary["output_dir"] = str(outdir)
    _emit(summary, out)


COMMANDS = {"gen": _cmd_gen, "solve": _cmd_solve, "theory": _cmd_theory, "experiment": _cmd_experiment}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        COMMANDS[args.command](args, out)
    except UsageError as exc:
        msg = str(exc)
        if not msg.startswith("usage:"):
            msg = parser.format_usage() + msg
        err.write(msg.rstrip("\n") + "\n")
        return 1
    except SubtensorError as exc:
        err.write(f"{type(exc).__name__}: {exc}\n")
        return 2
    except OSError as exc:
        err.write(f"error: {exc}\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
