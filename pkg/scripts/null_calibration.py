"""p-value uniformity of every hypothesis test under a true null.

Runs each test over many seeds on processes where the null holds and
reports the KS-vs-uniform meta p-value and the rejection rate at 1%.

    python scripts/null_calibration.py --seeds 100 --n 400
"""
import argparse
import time

import numpy as np

from isoss.config import givens
from isoss.factory import GeneratorSpec, StableSpec, invariant_sampler, self_similar_sampler, stable_sampler
from isoss.laws import JumpLaw
from isoss.spherical import AngularSpec
from isoss.stats import (
    independence_check, isotropy_check, ks_two_sample, multiplicative_invariance_check, polar_functionals,
    self_similarity_check, uniformity_meta_test,
)

X0 = np.array([0.3, 0.4, 1.0])


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--seeds", type=int, default=100)
    ap.add_argument("--n", type=int, default=400)
    ap.add_argument("--h", type=float, default=1e-2)
    ap.add_argument("--base-seed", type=int, default=123)
    args = ap.parse_args()

    ang = AngularSpec(3, c_sph=0.5, jump_rate=1.0, jump_angle_law=JumpLaw("beta", {"a": 2.0, "b": 2.0}))
    spec = GeneratorSpec(3, 1.0, a11=0.2, c1=0.1, angular=ang, radial_jump_rate=1.0,
                         radial_jump_law=JumpLaw("normal", {"mean": 0.0, "std": 0.3}), gamma=0.1)
    inv = invariant_sampler(spec, args.h)
    ss = self_similar_sampler(spec, args.h)
    stab = stable_sampler(StableSpec(2, 1.0, 0.05, (1.0, 0.0)), args.h)
    phi = givens(3, [(0, 2, 0.9)])
    n = args.n

    pvals: dict[str, list[float]] = {}
    start = time.perf_counter()
    for k in range(args.seeds):
        base = args.base_seed + 10 * k
        a = np.linalg.norm(stab([1.0, 0.0], 0.5, n, base), axis=1)
        b = np.linalg.norm(stab([1.0, 0.0], 0.5, n, base + 1), axis=1)
        reps = [ks_two_sample(a, b)]
        reps += self_similarity_check(ss, X0, 2.0, 0.25, n, base + 2, alpha=1.0)
        reps.append(isotropy_check(inv, X0, phi, 0.5, n, base + 3))
        reps += multiplicative_invariance_check(inv, X0, 2.0, 0.5, n, base + 4)
        reps.append(independence_check(polar_functionals(inv(X0, 0.5, n, base + 5), X0), seed=base + 6))
        for r in reps:
            pvals.setdefault(r.name, []).append(r.p_value)

    print(f"{args.seeds} seeds, n={n}, {time.perf_counter() - start:.0f} s")
    print(f"{'test':36s} {'meta p':>8s} {'reject@1%':>10s}")
    for name, p in pvals.items():
        p = np.asarray(p)
        print(f"{name:36s} {uniformity_meta_test(p).p_value:8.3f} {np.mean(p < 0.01):10.3f}")


if __name__ == "__main__":
    main()
