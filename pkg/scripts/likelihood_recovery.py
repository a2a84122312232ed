"""Likelihood recovery: SQ on the lognormal-diffusion likelihood vs the closed-form MLE.

    python scripts/likelihood_recovery.py --paths 5 --runs 10
"""

import argparse

import numpy as np

from quenchlab import diffusion
from quenchlab.sq_core import SqParams, run


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--paths", type=int, default=5)
    ap.add_argument("--runs", type=int, default=10)
    ap.add_argument("--cs", default="E")
    ap.add_argument("--nc", type=int, default=4000)
    ap.add_argument("--ni", type=int, default=8)
    ap.add_argument("--ps", type=int, default=4)
    ap.add_argument("--it", type=float, default=10.0)
    ap.add_argument("--linear", action="store_true", help="search sigma^2 linearly instead of log10")
    args = ap.parse_args()

    params = SqParams(args.cs, args.nc, args.ni, args.ps, args.it)
    print("path\ta_hat\tsigma2_hat\tlogL_max\tmedian_gap\tworst_gap\twithin_0.5")
    for k in range(args.paths):
        path = diffusion.reference_path(np.random.default_rng(1000 + k))
        obj = diffusion.likelihood_objective(path, log_sigma2=not args.linear)
        a_hat, s2_hat = diffusion.closed_form_mle(path)
        ll_max = diffusion.log_likelihood(path, a_hat, s2_hat)
        gaps = []
        for seed in range(args.runs):
            a, s2 = diffusion.point_to_params(obj, run(obj, params, seed).best_point)
            gaps.append(ll_max - diffusion.log_likelihood(path, a, s2))
        gaps = np.array(gaps)
        print(f"{k}\t{a_hat:.3e}\t{s2_hat:.3e}\t{ll_max:.3f}\t{np.median(gaps):.3g}\t"
              f"{gaps.max():.3g}\t{int(np.sum(gaps <= 0.5))}/{args.runs}")


if __name__ == "__main__":
    main()
