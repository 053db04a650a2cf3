"""Command-line front end: mbd <subcommand> [flags].

Subcommands: pmf, moments, classify, region, sample, selfcheck, report.
The first six emit deterministic text (CSV or JSON) with the fully resolved
parameter set echoed in the output header; report additionally renders
figures to files next to the delimited data.  Exit codes: 0 success, 2 bad
arguments, 1 computational failure (e.g. conditioning on a null event).
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import TextIO

import numpy as np

from .chain import ChainParams, ParameterError, State, make_params, state_prob
from .moments import moment_report, report_to_json
from .oracle import enumerate_paths, sample, sample_to_csv, sample_to_json
from .pmf import (ConditioningError, conditional_pmf, pmf, pmf_closed,
                  pmf_recurrence, pmf_to_csv, pmf_to_json)
from .shape import Shape, classify, classify_region, region_to_csv, region_to_json

__all__ = ["run", "main"]


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, required=True, help="number of steps")
    p.add_argument("--a", type=float, required=True, help="F->A transition probability")
    p.add_argument("--b", type=float, required=True, help="A->F transition probability")
    nu = p.add_mutually_exclusive_group(required=True)
    nu.add_argument("--nu-f", type=float, dest="nu_f",
                    help="initial probability of state F")
    nu.add_argument("--nu", choices=["stationary"],
                    help="start from the stationary law pi(a, b)")


def _add_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", default=None, help="output file (default stdout)")


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="mbd",
        description="Markov binomial distribution: PMF, moments, shape classification.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pmf", help="full or conditional PMF of K_n")
    _add_param_flags(p)
    p.add_argument("--cond", choices=["F", "A"], default=None,
                   help="condition on the terminal state")
    p.add_argument("--method", choices=["forward", "recurrence", "closed"],
                   default="forward", help="evaluator (cross-checking aid)")
    _add_output_flags(p)

    p = sub.add_parser("moments", help="mean, variance, conditional moments")
    _add_param_flags(p)
    _add_output_flags(p)

    p = sub.add_parser("classify", help="shape class of the PMF")
    _add_param_flags(p)
    p.add_argument("--cond", choices=["F", "A"], default=None)
    _add_output_flags(p)

    p = sub.add_parser("region", help="shape class over an (a, b) grid")
    p.add_argument("--n", type=int, required=True)
    nu = p.add_mutually_exclusive_group(required=True)
    nu.add_argument("--nu-f", type=float, dest="nu_f")
    nu.add_argument("--nu", choices=["stationary"])
    p.add_argument("--grid", type=int, default=100, help="cells per axis")
    _add_output_flags(p)

    p = sub.add_parser("sample", help="seeded Monte Carlo histogram of K_n")
    _add_param_flags(p)
    p.add_argument("--reps", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    _add_output_flags(p)

    p = sub.add_parser("selfcheck",
                       help="cross-validate the evaluators at reduced scale")
    p.add_argument("--out", default=None)

    p = sub.add_parser("report",
                       help="render figures plus the CSV/JSON data they show")
    _add_param_flags(p)
    p.add_argument("--grid", type=int, default=60,
                   help="cells per axis for the region figure")
    p.add_argument("--out-dir", dest="out_dir", default=".",
                   help="directory for the rendered files")

    return top


def _resolve(args) -> tuple[ChainParams, int]:
    if args.n < 1:
        raise ParameterError(f"--n must be >= 1, got {args.n}")
    if args.nu == "stationary":
        nu_F = args.b / (args.a + args.b)
    else:
        nu_F = args.nu_f
    return make_params(args.a, args.b, nu_F), args.n


def _cmd_pmf(args, out: TextIO) -> int:
    params, n = _resolve(args)
    if args.cond is not None:
        p = conditional_pmf(params, n, State[args.cond])
    elif args.method == "recurrence":
        p = pmf_recurrence(params, n)
    elif args.method == "closed":
        p = pmf_closed(params, n)
    else:
        p = pmf(params, n)
    out.write(pmf_to_json(p) + "\n" if args.format == "json" else pmf_to_csv(p))
    return 0


def _cmd_moments(args, out: TextIO) -> int:
    params, n = _resolve(args)
    report = moment_report(params, n)
    if args.format == "json":
        doc = {
            "params": {"a": params.a, "b": params.b, "nu_F": params.nu_F},
            "report": json.loads(report_to_json(report)),
        }
        out.write(json.dumps(doc) + "\n")
        return 0
    lines = [
        f"# n={n} a={params.a:.17g} b={params.b:.17g} nu_F={params.nu_F:.17g}",
        "key,value",
        f"n,{report.n}",
    ]
    for key in ("mean", "variance", "cond_mean_F", "cond_mean_A",
                "cond_var_F", "cond_var_A"):
        lines.append(f"{key},{getattr(report, key):.17g}")
    out.write("\n".join(lines) + "\n")
    return 0


def _cmd_classify(args, out: TextIO) -> int:
    params, n = _resolve(args)
    if args.cond is not None:
        p = conditional_pmf(params, n, State[args.cond])
    else:
        p = pmf(params, n)
    sc = classify(p)
    if args.format == "json":
        doc = {
            "params": {"a": params.a, "b": params.b, "nu_F": params.nu_F},
            "n": n,
            "kind": p.kind,
            "class": sc.shape.value,
            "boundary_values": list(sc.boundary_values),
            "margin": sc.margin,
        }
        out.write(json.dumps(doc) + "\n")
        return 0
    lines = [
        f"# n={n} a={params.a:.17g} b={params.b:.17g} nu_F={params.nu_F:.17g}"
        f" kind={p.kind}",
        "key,value",
        f"class,{sc.shape.value}",
        f"margin,{sc.margin:.17g}",
    ]
    labels = ("f(0)", "f(1)", "f(2)", "f(n-2)", "f(n-1)", "f(n)")
    lines.extend(f"{lab},{val:.17g}" for lab, val in zip(labels, sc.boundary_values))
    out.write("\n".join(lines) + "\n")
    return 0


def _cmd_region(args, out: TextIO) -> int:
    if args.n < 1:
        raise ParameterError(f"--n must be >= 1, got {args.n}")
    if args.grid < 2:
        raise ParameterError(f"--grid must be >= 2, got {args.grid}")
    nu_spec = "stationary" if args.nu == "stationary" else args.nu_f
    if not isinstance(nu_spec, str) and not 0.0 <= nu_spec <= 1.0:
        raise ParameterError(f"--nu-f must lie in [0, 1], got {nu_spec}")
    grid = classify_region(args.n, nu_spec, args.grid)
    out.write(region_to_json(grid) + "\n" if args.format == "json"
              else region_to_csv(grid))
    return 0


def _cmd_sample(args, out: TextIO) -> int:
    params, n = _resolve(args)
    if args.reps < 1:
        raise ParameterError(f"--reps must be >= 1, got {args.reps}")
    s = sample(params, n, args.reps, args.seed)
    out.write(sample_to_json(s, params) + "\n" if args.format == "json"
              else sample_to_csv(s, params))
    return 0


def _cmd_selfcheck(args, out: TextIO) -> int:
    """Reduced-scale rerun of the cross-validation suite; prints PASS/FAIL."""
    rng = np.random.default_rng(20250819)
    failures = 0

    def check(name: str, worst: float, tol: float) -> None:
        nonlocal failures
        ok = worst <= tol
        failures += not ok
        out.write(f"{'PASS' if ok else 'FAIL'} {name}:"
                  f" worst={worst:.3e} tol={tol:.0e}\n")

    worst = 0.0
    for _ in range(20):
        params = make_params(rng.uniform(0.02, 0.98), rng.uniform(0.02, 0.98),
                             rng.uniform(0.0, 1.0))
        for n in range(1, 11):
            reference = enumerate_paths(params, n).marginal
            worst = max(worst, float(np.abs(pmf(params, n).values - reference).max()))
    check("pmf vs path enumeration (n<=10, 20 tuples)", worst, 1e-12)

    worst = 0.0
    for _ in range(10):
        params = make_params(rng.uniform(0.02, 0.98), rng.uniform(0.02, 0.98),
                             rng.uniform(0.0, 1.0))
        for n in (2, 10, 50):
            ref = pmf(params, n).values
            for other in (pmf_recurrence(params, n).values,
                          pmf_closed(params, n).values):
                mask = ref >= 1e-250
                worst = max(worst, float((np.abs(other - ref)[mask]
                                          / ref[mask]).max()))
    check("three-way PMF agreement (n<=50, 10 tuples)", worst, 1e-9)

    worst = 0.0
    for _ in range(25):
        params = make_params(rng.uniform(0.02, 0.98), rng.uniform(0.02, 0.98),
                             rng.uniform(0.0, 1.0))
        n = int(rng.integers(2, 121))
        values = pmf(params, n).values
        js = np.arange(n + 1, dtype=float)
        m1 = float(js @ values)
        m2 = float((js - m1) ** 2 @ values)
        report = moment_report(params, n)
        worst = max(worst, abs(report.mean - m1) / max(abs(m1), 1e-15),
                    abs(report.variance - m2) / max(m2, 1e-15))
    check("closed moments vs PMF moments (25 tuples)", worst, 1e-9)

    bad = 0
    for _ in range(100):
        params = make_params(rng.uniform(0.02, 0.98), rng.uniform(0.02, 0.98),
                             rng.uniform(0.0, 1.0))
        n = int(rng.integers(4, 61))
        for tau, banned in ((State.F, (Shape.TRIMODAL, Shape.BIMODAL_LEFT)),
                            (State.A, (Shape.TRIMODAL, Shape.BIMODAL_RIGHT))):
            if state_prob(params, n, tau) <= 0.0:
                continue
            bad += classify(conditional_pmf(params, n, tau)).shape in banned
    check("conditional shape restrictions (100 tuples)", float(bad), 0.0)

    return 1 if failures else 0


def _cmd_report(args, out_stream: TextIO) -> int:
    from . import report as report_mod

    params, n = _resolve(args)
    nu_spec = "stationary" if args.nu == "stationary" else params.nu_F
    paths = report_mod.write_report(params, n, args.out_dir,
                                    grid_size=args.grid, nu_spec=nu_spec)
    out_stream.write("\n".join(paths) + "\n")
    return 0


_HANDLERS = {
    "pmf": _cmd_pmf,
    "moments": _cmd_moments,
    "classify": _cmd_classify,
    "region": _cmd_region,
    "sample": _cmd_sample,
    "selfcheck": _cmd_selfcheck,
    "report": _cmd_report,
}


def run(argv: list[str]) -> int:
    """Parse argv and dispatch; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse handles usage/errors itself
        return int(exc.code or 0)
    out = open(args.out, "w") if getattr(args, "out", None) else sys.stdout
    try:
        return _HANDLERS[args.command](args, out)
    except ParameterError as exc:
        print(f"mbd: argument error: {exc}", file=sys.stderr)
        return 2
    except (ConditioningError, ValueError, RuntimeError) as exc:
        print(f"mbd: {exc}", file=sys.stderr)
        return 1
    finally:
        if out is not sys.stdout:
            out.close()


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
