"""``quenchlab`` command line: run factorial designs and analyse their results."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import diffusion, harness
from .objectives import DomainError
from .stat_analysis import AnalysisError

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="quenchlab", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="execute a factorial design and write a results CSV")
    r.add_argument("--problem", required=True, help=" | ".join(harness.PROBLEMS))
    r.add_argument("--design", default="reduced", help="full, reduced or a design JSON file")
    r.add_argument("--reps", type=int, default=None, help="override the design's replicate count")
    r.add_argument("--seed", type=int, default=None, help="override the design's base seed")
    r.add_argument("--threads", type=int, default=1, help="worker processes (default 1)")
    r.add_argument("--path", default=None, help="likelihood only: diffusion path CSV (time,value)")
    r.add_argument("--out", required=True, help="results CSV")

    a = sub.add_parser("analyze", help="ANOVA, means, Tukey HSD and boxplot tables per factor")
    a.add_argument("--in", dest="inp", required=True, help="results CSV")
    a.add_argument("--alpha", type=float, default=0.05)
    a.add_argument("--direction", choices=("minimize", "maximize"), default=None,
                   help="default: maximize for likelihood, minimize otherwise")
    a.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("simulate-path", help="simulate a lognormal diffusion path to CSV")
    p.add_argument("--m", type=float, default=diffusion.REFERENCE_M)
    p.add_argument("--sigma2", type=float, default=diffusion.REFERENCE_SIGMA2)
    p.add_argument("--n", type=int, default=diffusion.REFERENCE_TIMES.size, help="observations at t = 0..n-1")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    return ap


def _cmd_run(args) -> int:
    if args.problem not in harness.PROBLEMS:
        raise harness.ConfigError(f"unknown problem {args.problem!r}; choose from {', '.join(harness.PROBLEMS)}")
    if args.threads < 1:
        raise harness.ConfigError("--threads must be >= 1")
    design = harness.load_design(args.design).replace(
        problem=args.problem, reps=args.reps, base_seed=args.seed)
    path = None
    if args.path is not None:
        if args.problem != "likelihood":
            raise harness.ConfigError("--path only applies to the likelihood problem")
        path = diffusion.read_path_csv(args.path)
    rs = harness.run_design(design, args.threads, path=path)
    harness.write_csv(rs, args.out)
    print(f"{len(rs)} runs of {args.problem} -> {args.out} (design {rs.fingerprint})", file=sys.stderr)
    return EXIT_OK


def _cmd_analyze(args) -> int:
    if not 0.0 < args.alpha < 1.0:
        raise harness.ConfigError("--alpha must lie in (0, 1)")
    rs = harness.read_csv(args.inp)
    if not rs.records:
        raise harness.ConfigError(f"{args.inp}: no records")
    problems = rs.problems()
    out = Path(args.out)
    for problem in problems:
        report = harness.analyze(rs, args.alpha, args.direction, problem=problem)
        dest = out if len(problems) == 1 else out / problem
        harness.write_report(report, dest)
        for name, fr in report.factors.items():
            if fr.notice:
                print(f"{problem}: {name}: {fr.notice}", file=sys.stderr)
            elif fr.anova is not None:
                a = fr.anova
                flag = "significant" if a.significant else "not significant"
                print(f"{problem}: {name}: F={a.f_value:.6g} p={a.p_value:.4g} ({flag})")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    import numpy as np

    if args.n < 2:
        raise harness.ConfigError("--n must be >= 2")
    rng = np.random.default_rng(args.seed)
    path = diffusion.simulate_path(args.m, args.sigma2, np.arange(args.n, dtype=float), 1.0, rng)
    diffusion.write_path_csv(path, args.out)
    return EXIT_OK


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    cmd = {"run": _cmd_run, "analyze": _cmd_analyze, "simulate-path": _cmd_simulate}[args.command]
    try:
        return cmd(args)
    except (harness.ConfigError, DomainError, AnalysisError) as exc:
        print(f"quenchlab: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, ValueError) as exc:
        print(f"quenchlab: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
