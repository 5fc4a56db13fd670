#!/usr/bin/env python3
"""Energy-conservation diagnostic for the full solver and the envelope flow.

Runs both models from the same perturbed-Stokes data and prints the
relative Hamiltonian drift over time.

Usage: python scripts/energy_drift.py [--t-end T] [--b0 B0] [--out DIR]
"""

import argparse

from deepwater.harness import RunConfig, run


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--t-end", type=float, default=50.0)
    ap.add_argument("--b0", type=float, default=0.003)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()
    base = dict(nx=256, ny=32, dt=0.005, t_end=args.t_end, snapshot_dt=args.t_end / 10,
                k0=10.0, g=1.0, b0=args.b0, a0=None, lam=1.0, mu=1.0)
    for model in ("full", "hamiltonian-dysthe"):
        res = run(RunConfig(model=model, **base),
                  out_dir=f"{args.out}/{model}" if args.out else None, keep_fields=False)
        col = 2 if model == "full" else 5
        drift = max(row[col] for row in res.series)
        print(f"{model}: max |dH/H0| = {drift:.3e} over t = {args.t_end:g}")


if __name__ == "__main__":
    main()
