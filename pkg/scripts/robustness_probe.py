"""Distance-versus-suboptimality sweep on an odd cycle, written as CSV.

Walks X_t = (1-t) X* + t F and prints the fitted scaling exponents of the
Gram, vector and projector distances against epsilon.

    python scripts/robustness_probe.py --n 5 --steps 30 --csv probe_c5.csv
"""

import argparse
import csv

from ctxselftest.graphs import cycle_graph
from ctxselftest.robustness import (
    CSV_COLUMNS,
    fit_scaling_exponent,
    random_family_probe,
    suboptimality_distance_probe,
)
from ctxselftest.theta_sdp import build_problem, solve


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=5)
    ap.add_argument("--steps", type=int, default=25)
    ap.add_argument("--eps-min", type=float, default=1e-6)
    ap.add_argument("--eps-max", type=float, default=1e-1)
    ap.add_argument("--trials", type=int, default=20, help="random-family trials (0 to skip)")
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--csv", help="write the path probe here")
    args = ap.parse_args()

    g = cycle_graph(args.n)
    sol = solve(build_problem(g))
    kappa = sol.objective - args.n / (args.n + 1)  # epsilon per unit t
    probe = suboptimality_distance_probe(g, sol, args.steps, args.eps_min / kappa, min(1.0, args.eps_max / kappa))

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_COLUMNS)
            w.writerows([format(v, ".17g") for v in p.as_row()] for p in probe.points)
        print(f"wrote {len(probe.points)} rows to {args.csv}")

    print(f"C_{args.n}: theta = {sol.objective:.9f}, kappa = {kappa:.6f}")
    for which in ("gram_distance", "vector_distance", "projector_distance"):
        slope, r2 = fit_scaling_exponent(probe, which)
        print(f"  {which:<20} exponent {slope:.4f}  (R^2 {r2:.5f})")
    s = probe.summary()
    print(f"  gram/eps in [{s['min_gram_ratio']:.4f}, {s['max_gram_ratio']:.4f}]")
    print(f"  max projector/sqrt(eps) = {s['max_projector_ratio_sqrt']:.4f}")

    if args.trials:
        rnd = random_family_probe(g, sol, trials=args.trials, seed=args.seed)
        rs = rnd.summary()
        print(
            f"random family: {rs['points']}/{args.trials} feasible; "
            f"max gram/eps = {rs['max_gram_ratio']:.3f}, max projector/sqrt(eps) = {rs['max_projector_ratio_sqrt']:.3f}"
        )
        print(f"  (epsilon ranges {min(rnd.column('epsilon')):.2e} .. {max(rnd.column('epsilon')):.2e})"
              if rnd.points else "")


if __name__ == "__main__":
    main()
