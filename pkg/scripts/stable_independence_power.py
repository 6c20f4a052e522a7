"""Power of the independence test on time-changed isotropic stable paths.

For a stable process the radial and angular parts jump together, so
log r and the angular displacement of the time-changed process are
dependent. How visible that is depends on t* and N; this script tabulates
the rejection rate at 1% over a few seeds.

Reaching larger t* needs long stable paths (paths far from the origin make
A grow slowly), so memory grows quickly with t* and N: t* = 0.3 at N = 2000
does not fit in 6 GB.

    python scripts/stable_independence_power.py --reps 20 --n 500
"""
import argparse

import numpy as np

from isoss.factory import StableSpec, time_changed_stable_sampler
from isoss.stats import independence_check, polar_functionals


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--reps", type=int, default=20)
    ap.add_argument("--t-star", type=float, nargs="+", default=[0.05, 0.1, 0.3])
    ap.add_argument("--n", type=int, nargs="+", default=[500])
    ap.add_argument("--eps", type=float, default=0.01)
    ap.add_argument("--h", type=float, default=1e-3)
    args = ap.parse_args()

    spec = StableSpec(2, 1.0, args.eps, (1.0, 0.0))
    x0 = np.array(spec.x0)
    sampler = time_changed_stable_sampler(spec, args.h)
    print(f"{'t*':>6s} {'N':>6s} {'mean rho':>9s} {'power':>6s}")
    for t in args.t_star:
        for n in args.n:
            reps = [independence_check(polar_functionals(sampler(x0, t, n, (k, 0)), x0), seed=(k, 1))
                    for k in range(args.reps)]
            rho = np.mean([r.statistic for r in reps])
            power = np.mean([r.p_value < 0.01 for r in reps])
            print(f"{t:6.2f} {n:6d} {rho:9.3f} {power:6.2f}", flush=True)


if __name__ == "__main__":
    main()
