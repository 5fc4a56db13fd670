"""Command-line interface.

Subcommands: simulate-full, simulate-envelope, reconstruct, stability-map,
compare, verify-coeffs, probe-growth. Exit codes: 0 on success, 2 on
configuration errors, 3 on numerical blow-up.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

import numpy as np

from . import envelope as env
from . import harness, normalform as nf
from . import reconstruct as rec
from . import stability as stab
from .euler3d import BlowUpError
from .harness import ConfigError, RunConfig
from .snapshots import ensure_dir, read_field, write_cross_section_csv, write_csv, write_field
from .spectral import ComplexField


def _build_config(args, model: str | None = None) -> RunConfig:
    overrides = {}
    if args.config:
        with open(args.config) as fh:
            overrides = json.load(fh)
    if args.preset:
        cfg = harness.preset_config(args.preset, overrides, model)
    else:
        if model is not None:
            overrides = dict(overrides, model=model)
        cfg = RunConfig.from_dict(overrides)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    return cfg.validate()


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", metavar="PATH", help="flat JSON run configuration")
    p.add_argument("--preset", metavar="NAME", help=f"one of {sorted(harness.PRESETS)}")
    p.add_argument("--out", metavar="DIR", help="output directory")
    p.add_argument("--seed", type=int, default=None, metavar="N")


def _cmd_simulate_full(args) -> int:
    cfg = _build_config(args, model="full")
    res = harness.run(cfg, out_dir=args.out, keep_fields=False)
    print(f"simulated full system to t={res.times[-1]:g}; "
          f"final relative dH = {res.series[-1][2]:.3e}")
    return 0


def _cmd_simulate_envelope(args) -> int:
    cfg = _build_config(args)
    if cfg.model == "full":
        raise ConfigError("simulate-envelope needs an envelope model")
    res = harness.run(cfg, out_dir=args.out, keep_fields=False)
    print(f"simulated {cfg.model} to t={res.times[-1]:g}; "
          f"final relative dH = {res.series[-1][5]:.3e}")
    return 0


def _cmd_reconstruct(args) -> int:
    field = read_field(args.snapshot)
    if not isinstance(field, ComplexField):
        raise ConfigError("reconstruct expects a complex envelope snapshot")
    carrier = env.CarrierParams(args.k0, args.g)
    state = env.EnvelopeState(field, carrier, args.t)
    if args.route == "stokes":
        surf = rec.reconstruct_classical(state)
    else:
        surf = rec.reconstruct_hamiltonian(state, ds=args.ds)
    out = ensure_dir(args.out or ".")
    write_field(out / "eta.dwf", surf.eta)
    write_field(out / "xi.dwf", surf.xi)
    if args.cross_section:
        write_cross_section_csv(out / "eta_section.csv", surf.eta)
        write_cross_section_csv(out / "xi_section.csv", surf.xi)
    print(f"wrote reconstructed surface to {out}")
    return 0


def _cmd_stability_map(args) -> int:
    out = ensure_dir(args.out or ".")
    sm = stab.build_stability_map(
        args.b0, args.k0, args.g, args.eps,
        lam_range=(args.lam_min, args.lam_max),
        mu_range=(args.mu_min, args.mu_max),
        n_lam=args.n_lam, n_mu=args.n_mu,
    )
    rows = []
    for i, L in enumerate(sm.lams):
        for j, M in enumerate(sm.mus):
            rows.append((L, M, float(sm.unstable[i, j]), sm.growth[i, j]))
    write_csv(out / "stability_map.csv", "lambda,mu,unstable,growth", rows)
    from .snapshots import write_pgm

    write_pgm(out / "growth.pgm", sm.growth.T[::-1])
    edge_rows = []
    for M in sm.mus:
        q = stab.StabilityQuery(args.b0, args.k0, args.g, args.eps, 1.0, 0.0)
        for lo, hi in stab.band_edges(q, mu=float(M), lam_max=args.lam_max):
            edge_rows.append((M, lo, hi))
    write_csv(out / "band_edges.csv", "mu,lam_lo,lam_hi", edge_rows)
    print(f"max growth {sm.growth.max():.4e} at (lambda, mu) = {sm.argmax}")
    return 0


def _cmd_compare(args) -> int:
    full = harness.load_run(args.full)
    envr = harness.load_run(args.envelope)
    rep = harness.compare(full, envr)
    out = ensure_dir(args.out or ".")
    write_csv(out / "errors.csv", "t,linf,l2", rep.rows())
    print(f"final relative errors: Linf={rep.linf[-1]:.4e} L2={rep.l2[-1]:.4e}")
    return 0


def _cmd_verify_coeffs(args) -> int:
    out = ensure_dir(args.out or ".")
    rng = np.random.default_rng(args.seed or 0)
    k0 = args.k0
    target = k0**3 / (8.0 * np.pi**2)
    chis = nf.random_zero_sum_chis(rng, 20)
    eps_values = (0.008, 0.004, 0.002, 0.001)
    residuals = []
    for eps in eps_values:
        r = max(abs(nf.homogenized_coeff(k0, chis[i], eps) - target) for i in range(len(chis)))
        residuals.append(r)
    slope = float(np.polyfit(np.log(eps_values), np.log(residuals), 1)[0])
    write_csv(out / "coeffs.csv", "epsilon,residual,slope",
              [(e, r, slope) for e, r in zip(eps_values, residuals)])
    rep = nf.verify_T1_expansion(k0, seed=args.seed or 0)
    write_csv(out / "t1_expansion.csv", "epsilon,residual,slope",
              [(e, r, rep.slope) for e, r in zip(rep.eps, rep.residuals)])
    print(f"homogenized-coefficient slope {slope:.3f}; T1 expansion slope {rep.slope:.3f}")
    return 0


def _cmd_probe_growth(args) -> int:
    cfg = _build_config(args)
    if cfg.model == "full":
        raise ConfigError("probe-growth needs an envelope model")
    res = harness.run(cfg, out_dir=args.out, keep_fields=True)
    rate, grew = harness.sideband_growth_probe(res)
    q = stab.StabilityQuery(cfg.amplitudes()[1], cfg.k0, cfg.g, 1.0, cfg.lam, cfg.mu)
    predicted = stab.growth_rate_eig(q, cfg.model if cfg.model in env.VARIANTS else "hamiltonian-dysthe")
    if args.out:
        times, amps = harness.mode_amplitude_series(res, cfg.lam, cfg.mu)
        write_csv(ensure_dir(args.out) / "probe.csv", "t,amplitude", zip(times, amps))
    if not grew:
        print(f"no exponential window found (stable); predicted rate {predicted:.4e}")
    else:
        print(f"measured growth {rate:.4e}; predicted {predicted:.4e}; ratio {rate/predicted:.3f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="deepwater", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate-full", help="run the full surface Euler solver")
    _add_common(p)
    p.set_defaults(fn=_cmd_simulate_full)

    p = sub.add_parser("simulate-envelope", help="run an envelope model")
    _add_common(p)
    p.set_defaults(fn=_cmd_simulate_envelope)

    p = sub.add_parser("reconstruct", help="envelope snapshot -> surface snapshot pair")
    p.add_argument("snapshot", help="complex envelope field (.dwf)")
    p.add_argument("--out", metavar="DIR")
    p.add_argument("--k0", type=float, required=True)
    p.add_argument("--g", type=float, default=1.0)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--ds", type=float, default=0.005)
    p.add_argument("--route", choices=("burgers", "stokes"), default="burgers")
    p.add_argument("--cross-section", action="store_true")
    p.set_defaults(fn=_cmd_reconstruct)

    p = sub.add_parser("stability-map", help="instability raster, growth heatmap, band edges")
    p.add_argument("--out", metavar="DIR")
    p.add_argument("--b0", type=float, default=0.003)
    p.add_argument("--k0", type=float, default=10.0)
    p.add_argument("--g", type=float, default=1.0)
    p.add_argument("--eps", type=float, default=1.0)
    p.add_argument("--lam-min", type=float, default=0.02)
    p.add_argument("--lam-max", type=float, default=4.0)
    p.add_argument("--mu-min", type=float, default=0.0)
    p.add_argument("--mu-max", type=float, default=2.0)
    p.add_argument("--n-lam", type=int, default=200)
    p.add_argument("--n-mu", type=int, default=100)
    p.set_defaults(fn=_cmd_stability_map)

    p = sub.add_parser("compare", help="error time series between two run directories")
    p.add_argument("--full", required=True, metavar="DIR")
    p.add_argument("--envelope", required=True, metavar="DIR")
    p.add_argument("--out", metavar="DIR")
    p.set_defaults(fn=_cmd_compare)

    p = sub.add_parser("verify-coeffs", help="sampled kernel limits and slope fits")
    p.add_argument("--out", metavar="DIR")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k0", type=float, default=10.0)
    p.set_defaults(fn=_cmd_verify_coeffs)

    p = sub.add_parser("probe-growth", help="measure seeded sideband growth in a run")
    _add_common(p)
    p.set_defaults(fn=_cmd_probe_growth)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except BlowUpError as e:
        print(f"numerical {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
