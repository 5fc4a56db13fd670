#!/usr/bin/env python3
"""Instability rasters and band edges for both published parameter sets.

Usage: python scripts/make_stability_map.py [--out DIR]
"""

import argparse

from deepwater.cli import main as cli_main


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="runs/stability")
    args = ap.parse_args()
    for b0 in (0.003, 0.0035):
        rc = cli_main([
            "stability-map", "--b0", str(b0), "--k0", "10",
            "--out", f"{args.out}/b0_{b0}",
        ])
        if rc != 0:
            raise SystemExit(rc)


if __name__ == "__main__":
    main()
