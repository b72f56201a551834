"""Solve time per algorithm versus the number of users (median over trials)."""

import argparse

import numpy as np

from robust_swipt.harness import bench

if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--Ks", default="2,3,4")
    p.add_argument("--N", type=int, default=8)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    Ks = tuple(int(k) for k in args.Ks.split(","))
    times = bench(Ks, args.N, args.trials, args.seed, ("alg1", "alg2", "alg3", "nonrobust"))
    print(f"{'K':>3} " + " ".join(f"{a:>10}" for a in times))
    for K in Ks:
        print(f"{K:>3} " + " ".join(f"{np.median(times[a][K]):>10.4f}" for a in times))
