"""How often each cooling schedule accepts worsening moves, and what that does to the result.

For one configuration per schedule, prints the temperature and the share of
worsening proposals accepted at a few cooling steps, plus the mean final
fitness over a handful of seeds.

    python scripts/schedule_diagnostics.py --problem griewangk --nc 1000 --it 100
"""

import argparse

import numpy as np

from quenchlab.objectives import make_objective
from quenchlab.sq_core import SCHEDULES, SqParams, run, temperatures


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--problem", default="griewangk")
    ap.add_argument("--nc", type=int, default=1000)
    ap.add_argument("--ni", type=int, default=4)
    ap.add_argument("--ps", type=int, default=2)
    ap.add_argument("--it", type=float, default=100.0)
    ap.add_argument("--seeds", type=int, default=5)
    args = ap.parse_args()

    obj = make_objective(args.problem)
    checkpoints = sorted({0, 1, 2, 5, 10, args.nc // 10, args.nc - 1})
    for cs in SCHEDULES:
        p = SqParams(cs, args.nc, args.ni, args.ps, args.it)
        temps = temperatures(p)
        prop = np.zeros(args.nc)
        acc = np.zeros(args.nc)
        finals = []
        for seed in range(args.seeds):
            res = run(obj, p, seed, trace=True)
            prop += res.worse_proposed
            acc += res.worse_accepted
            finals.append(res.best_fitness)
        print(f"{cs}: mean final fitness {np.mean(finals):.4g} (sd {np.std(finals, ddof=1):.3g})")
        for c in checkpoints:
            rate = acc[c] / prop[c] if prop[c] else float("nan")
            print(f"   step {c:6d}  T={temps[c]:.3e}  worsening accepted {rate:.3f}")


if __name__ == "__main__":
    main()
