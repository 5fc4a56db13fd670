#!/usr/bin/env python3
"""Desk-scale model comparison: full Euler vs both Dysthe variants.

Runs the full solver twice (once per initialization route), the Hamiltonian
and classical envelope models, and writes the relative error time series of
each envelope model against its full counterpart.

Usage: python scripts/run_model_comparison.py [--out DIR] [--t-end T] [--dt-full DT]
"""

import argparse
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from deepwater.harness import RunConfig, compare, load_run, run
from deepwater.snapshots import write_csv

BASE = dict(nx=256, ny=32, k0=10.0, g=1.0, lam=1.0, mu=1.0, snapshot_dt=25.0)
B0 = 0.003
A0 = B0 * (4 * BASE["k0"]) ** 0.25


def job(arg):
    name, out, t_end, dt_full = arg
    if name == "full_ham":
        cfg = RunConfig(model="full", dt=dt_full, t_end=t_end, b0=B0, a0=None, **BASE)
    elif name == "full_cl":
        cfg = RunConfig(model="full", dt=dt_full, t_end=t_end, b0=None, a0=A0, **BASE)
    elif name == "ham":
        cfg = RunConfig(model="hamiltonian-dysthe", dt=0.02, t_end=t_end, b0=B0, a0=None, **BASE)
    else:
        cfg = RunConfig(model="classical-dysthe", dt=0.02, t_end=t_end, b0=None, a0=A0, **BASE)
    run(cfg, out_dir=out, keep_fields=False)
    return name


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="runs/comparison")
    ap.add_argument("--t-end", type=float, default=250.0)
    ap.add_argument("--dt-full", type=float, default=0.01)
    args = ap.parse_args()
    out = Path(args.out)
    jobs = [(n, str(out / n), args.t_end, args.dt_full) for n in ("full_ham", "full_cl", "ham", "cl")]
    with ProcessPoolExecutor(max_workers=2) as ex:
        for name in ex.map(job, jobs):
            print(f"finished {name}")
    rep_h = compare(load_run(out / "full_ham"), load_run(out / "ham"))
    rep_c = compare(load_run(out / "full_cl"), load_run(out / "cl"))
    write_csv(out / "errors_hamiltonian.csv", "t,linf,l2", rep_h.rows())
    write_csv(out / "errors_classical.csv", "t,linf,l2", rep_c.rows())
    print(f"final L2: hamiltonian {rep_h.l2[-1]:.4f}, classical {rep_c.l2[-1]:.4f}")


if __name__ == "__main__":
    main()
