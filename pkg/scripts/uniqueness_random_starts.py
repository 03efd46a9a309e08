"""Empirical uniqueness: solve the theta SDP from many random feasible starts.

    python scripts/uniqueness_random_starts.py --n 5 --runs 20
"""

import argparse

import numpy as np

from ctxselftest import linalg
from ctxselftest.graphs import cycle_graph
from ctxselftest.theta_sdp import build_problem, solve


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=5)
    ap.add_argument("--runs", type=int, default=20)
    args = ap.parse_args()

    p = build_problem(cycle_graph(args.n))
    sols = [solve(p, seed=s) for s in range(args.runs)]
    ref = sols[0].x
    dists = np.array([linalg.frob(s.x - ref) for s in sols])
    iters = [s.iterations for s in sols]
    print(f"C_{args.n}: {sum(s.converged for s in sols)}/{args.runs} converged, iterations {min(iters)}..{max(iters)}")
    print(f"max ||X_k - X_0||_F = {dists.max():.2e}, rank of X_0 = {linalg.gram_decompose(ref).shape[1]}")


if __name__ == "__main__":
    main()
