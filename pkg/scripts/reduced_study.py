"""Reduced-design factor study on the benchmark functions.

Runs the ``reduced`` design for each problem and base seed, then prints the
ANOVA p-values per factor and the ratio of the C-schedule mean fitness to the
better of M and E.

    python scripts/reduced_study.py --seeds 7 8 9 --threads 4 --out runs/
"""

import argparse
from pathlib import Path

from quenchlab import harness


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--problems", nargs="+", default=["griewangk", "rastrigin", "ackley"])
    ap.add_argument("--seeds", nargs="+", type=int, default=[7, 8, 9])
    ap.add_argument("--reps", type=int, default=None)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("runs"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    print("problem\tseed\t" + "\t".join(f"p_{f.upper()}" for f in harness.FACTORS) + "\tC/min(M,E)")
    for problem in args.problems:
        for seed in args.seeds:
            csv_path = args.out / f"{problem}_seed{seed}.csv"
            if csv_path.exists():
                rs = harness.read_csv(csv_path)
            else:
                design = harness.REDUCED.replace(problem=problem, base_seed=seed, reps=args.reps)
                rs = harness.run_design(design, args.threads)
                harness.write_csv(rs, csv_path)
            rep = harness.analyze(rs)
            ps = [rep.factors[f.upper()].anova.p_value for f in harness.FACTORS]
            means = dict(rep.factors["CS"].means)
            ratio = means["C"] / min(means["M"], means["E"])
            print(f"{problem}\t{seed}\t" + "\t".join(f"{p:.3g}" for p in ps) + f"\t{ratio:.3f}", flush=True)


if __name__ == "__main__":
    main()
