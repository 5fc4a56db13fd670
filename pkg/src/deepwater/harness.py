"""Run configuration and experiment orchestration.

A run simulates one model (the full system or an envelope equation) from
perturbed-Stokes initial data, records conserved-quantity time series, and
emits surface snapshots at a fixed cadence. Envelope runs also emit
reconstructed surfaces so that ``compare`` can measure envelope-vs-full
errors snapshot by snapshot.

Initial data convention: giving ``B0`` selects the envelope normalization
whose surfaces come from the non-perturbative (Burgers) reconstruction;
giving ``A0`` selects the classical normalization with the Stokes-expansion
reconstruction. Full-system runs are initialized through the corresponding
route, matching the comparison protocol.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import scipy.fft as _sfft

from . import envelope as env
from . import reconstruct as rec
from .dno import DnoConfig
from .euler3d import BlowUpError, FullSolver, FullSolverConfig, SurfaceState, hamiltonian_full
from .snapshots import ensure_dir, read_field, write_csv, write_field
from .spectral import ComplexField, Grid2D, RealField

MODELS = ("full",) + env.VARIANTS


class ConfigError(ValueError):
    """Invalid run configuration (CLI exit code 2)."""


_JSON_KEYS = {
    "Nx": "nx",
    "Ny": "ny",
    "Lx": "lx",
    "Ly": "ly",
    "dt": "dt",
    "t_end": "t_end",
    "snapshot_dt": "snapshot_dt",
    "model": "model",
    "k0": "k0",
    "g": "g",
    "B0": "b0",
    "A0": "a0",
    "lambda": "lam",
    "mu": "mu",
    "perturbation": "perturbation",
    "dno_order": "dno_order",
    "out_dir": "out_dir",
    "seed": "seed",
}


@dataclass(frozen=True)
class RunConfig:
    nx: int = 256
    ny: int = 32
    lx: float = 2.0 * math.pi
    ly: float = 2.0 * math.pi
    dt: float = 0.005
    t_end: float = 250.0
    snapshot_dt: float = 25.0
    model: str = "hamiltonian-dysthe"
    k0: float = 10.0
    g: float = 1.0
    b0: float | None = 0.003
    a0: float | None = None
    lam: float = 1.0
    mu: float = 1.0
    perturbation: float = 0.1
    dno_order: int = 4
    out_dir: str | None = None
    seed: int = 0

    def validate(self) -> "RunConfig":
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}; choose from {MODELS}")
        if self.dt <= 0 or self.t_end <= 0:
            raise ConfigError("dt and t_end must be positive")
        if not (0 <= self.dno_order <= 6):
            raise ConfigError("dno_order must be in [0, 6]")
        if (self.b0 is None) == (self.a0 is None):
            raise ConfigError("provide exactly one of B0, A0")
        for val, length, name in (
            (self.k0, self.lx, "k0"),
            (self.lam, self.lx, "lambda"),
            (self.mu, self.ly, "mu"),
        ):
            ratio = val * length / (2.0 * math.pi)
            if abs(ratio - round(ratio)) > 1e-9:
                raise ConfigError(f"{name}={val} is not on the lattice of the box")
        if self.k0 <= 0:
            raise ConfigError("k0 must be positive")
        ratio = self.snapshot_dt / self.dt
        if self.snapshot_dt <= 0 or abs(ratio - round(ratio)) > 1e-6:
            raise ConfigError("snapshot_dt must be a positive integer multiple of dt")
        try:
            Grid2D(self.nx, self.ny, self.lx, self.ly)
        except ValueError as e:
            raise ConfigError(str(e)) from e
        return self

    @classmethod
    def from_json(cls, path) -> "RunConfig":
        with open(path) as fh:
            data = json.load(fh)
        return cls.from_dict(data)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        unknown = set(data) - set(_JSON_KEYS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs = {_JSON_KEYS[k]: v for k, v in data.items()}
        if "b0" in kwargs and "a0" not in kwargs:
            kwargs["a0"] = None
        if "a0" in kwargs and "b0" not in kwargs:
            kwargs["b0"] = None
        return cls(**kwargs).validate()

    def to_dict(self) -> dict:
        inv = {v: k for k, v in _JSON_KEYS.items()}
        return {inv[k]: v for k, v in asdict(self).items()}

    @property
    def grid(self) -> Grid2D:
        return Grid2D(self.nx, self.ny, self.lx, self.ly)

    @property
    def carrier(self) -> env.CarrierParams:
        return env.CarrierParams(self.k0, self.g)

    def amplitudes(self) -> tuple[float, float]:
        """(A0, B0), converting whichever was given."""
        w = (self.g / (4.0 * self.k0)) ** 0.25
        if self.b0 is not None:
            return self.b0 / w, self.b0
        return self.a0, self.a0 * w


PRESETS = {
    # desk-scale analog of the published runs: case B0 = 0.003
    "paper-small": dict(
        Nx=256, Ny=32, dt=0.005, t_end=250.0, snapshot_dt=25.0,
        k0=10.0, g=1.0, B0=0.003, **{"lambda": 1.0}, mu=1.0,
    ),
    # case B0 = 0.0035 with sideband growth probing
    "paper-small-growth": dict(
        Nx=256, Ny=32, dt=0.005, t_end=150.0, snapshot_dt=0.5,
        k0=10.0, g=1.0, B0=0.0035, **{"lambda": 1.0}, mu=0.0,
    ),
    # quick smoke preset
    "smoke": dict(
        Nx=64, Ny=16, dt=0.01, t_end=1.0, snapshot_dt=0.5,
        k0=4.0, g=1.0, B0=0.003, **{"lambda": 1.0}, mu=1.0,
    ),
}


def preset_config(name: str, overrides: dict | None = None, model: str | None = None) -> RunConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    data = dict(PRESETS[name])
    data.update(overrides or {})
    if model is not None:
        data["model"] = model
    return RunConfig.from_dict(data)


# ---------------------------------------------------------------------------
# Runs
# ---------------------------------------------------------------------------


@dataclass
class RunResult:
    config: RunConfig
    times: list
    series: list  # one row per snapshot, per-model columns
    surfaces: list  # SurfaceState per snapshot (full or reconstructed)
    envelopes: list  # EnvelopeState per snapshot (envelope models only)
    out_dir: str | None = None

    @property
    def columns(self) -> tuple:
        if self.config.model == "full":
            return ("t", "H", "relative_dH", "eta_max", "eta_min")
        return ("t", "H", "M", "Ix", "Iy", "relative_dH")


def initial_envelope(config: RunConfig) -> env.EnvelopeState:
    """Perturbed-Stokes envelope in the normalization selected by the config."""
    a0, b0 = config.amplitudes()
    amp = b0 if config.b0 is not None else a0
    return env.initial_perturbed_stokes(
        amp, config.lam, config.mu, config.grid, config.carrier, config.perturbation
    )


def initial_surface(config: RunConfig) -> SurfaceState:
    """Surface initial data through the route matching the given amplitude."""
    state = initial_envelope(config)
    if config.b0 is not None:
        return rec.reconstruct_hamiltonian(state, ds=config.dt)
    return rec.reconstruct_classical(state)


def _snapshot_count(config: RunConfig) -> tuple[int, int]:
    steps_per_snap = int(round(config.snapshot_dt / config.dt))
    total_steps = int(round(config.t_end / config.dt))
    return steps_per_snap, total_steps


def run(
    config: RunConfig,
    out_dir=None,
    initial=None,
    keep_fields: bool = True,
    reconstruct_surfaces: bool = True,
) -> RunResult:
    """Simulate the configured model; deterministic for a fixed config.

    ``initial`` restarts from a given state (its time must sit on the
    snapshot lattice). Artifacts on disk: per-snapshot field files, a
    time-series CSV, and runinfo.json describing the run.
    ``reconstruct_surfaces=False`` skips the per-snapshot surface
    reconstruction of envelope runs (probe runs only need the envelope).
    """
    config.validate()
    out = ensure_dir(out_dir) if out_dir else (ensure_dir(config.out_dir) if config.out_dir else None)
    if config.model == "full":
        result = _run_full(config, out, initial, keep_fields)
    else:
        result = _run_envelope(config, out, initial, keep_fields, reconstruct_surfaces)
    if out is not None:
        header = ",".join(result.columns)
        write_csv(out / "series.csv", header, result.series)
        info = {
            "config": config.to_dict(),
            "times": result.times,
            "columns": list(result.columns),
        }
        (out / "runinfo.json").write_text(json.dumps(info, indent=1, sort_keys=True))
        result.out_dir = str(out)
    return result


def _snap_name(kind: str, idx: int) -> str:
    return f"{kind}_{idx:05d}.dwf"


def _run_full(config: RunConfig, out, initial, keep_fields) -> RunResult:
    grid = config.grid
    cfg = FullSolverConfig(DnoConfig(config.dno_order, config.g), config.dt, config.g)
    solver = FullSolver(grid, cfg)
    state = initial if initial is not None else initial_surface(config)
    steps_per_snap, total_steps = _snapshot_count(config)
    start_step = int(round(state.t / config.dt))

    times, series, surfaces = [], [], []
    h0 = None

    def record(s: SurfaceState, idx: int):
        nonlocal h0
        h = hamiltonian_full(s, cfg)
        if h0 is None:
            h0 = h
        rel = abs(h - h0) / abs(h0) if h0 else 0.0
        times.append(s.t)
        series.append((s.t, h, rel, float(s.eta.samples.max()), float(s.eta.samples.min())))
        if keep_fields:
            surfaces.append(s.copy())
        if out is not None:
            write_field(out / _snap_name("eta", idx), s.eta)
            write_field(out / _snap_name("xi", idx), s.xi)

    snap_idx = start_step // steps_per_snap
    record(state, snap_idx)
    ops = solver.ops
    raw_eta = ops.to_raw(state.eta.samples)
    raw_xi = ops.to_raw(state.xi.samples)
    for step in range(start_step + 1, total_steps + 1):
        raw_eta, raw_xi = solver.step_raw(raw_eta, raw_xi)
        if step % steps_per_snap == 0:
            t = step * config.dt
            eta = ops.to_phys(raw_eta)
            xi = ops.to_phys(raw_xi)
            if not (np.all(np.isfinite(eta)) and np.all(np.isfinite(xi))):
                raise BlowUpError(t)
            s = SurfaceState(RealField(grid, eta), RealField(grid, xi), t)
            record(s, step // steps_per_snap)
    return RunResult(config, times, series, surfaces, [])


def _run_envelope(config: RunConfig, out, initial, keep_fields, reconstruct_surfaces=True) -> RunResult:
    grid = config.grid
    carrier = config.carrier
    model = env.EnvelopeModel(config.model)
    solver = env.EnvelopeSolver(grid, carrier, model, config.dt)
    state = initial if initial is not None else initial_envelope(config)
    steps_per_snap, total_steps = _snapshot_count(config)
    start_step = int(round(state.t / config.dt))
    classical = config.model == "classical-dysthe"

    times, series, surfaces, envelopes = [], [], [], []
    h0 = None

    def record(s: env.EnvelopeState, idx: int):
        nonlocal h0
        h = env.hamiltonian_envelope(s)
        if h0 is None:
            h0 = h
        rel = abs(h - h0) / abs(h0) if h0 else 0.0
        m = env.wave_action(s)
        ix, iy = env.impulse(s)
        times.append(s.t)
        series.append((s.t, h, m, ix, iy, rel))
        if keep_fields:
            envelopes.append(s.copy())
        if out is not None:
            write_field(out / _snap_name("u", idx), s.u)
        if reconstruct_surfaces:
            surf = rec.reconstruct_classical(s) if classical else rec.reconstruct_hamiltonian(s, ds=config.dt)
            if keep_fields:
                surfaces.append(surf)
            if out is not None:
                write_field(out / _snap_name("eta", idx), surf.eta)
                write_field(out / _snap_name("xi", idx), surf.xi)

    snap_idx = start_step // steps_per_snap
    record(state, snap_idx)
    u_hat = _sfft.fft2(state.u.samples)
    for step in range(start_step + 1, total_steps + 1):
        u_hat = solver.step_raw(u_hat)
        if step % steps_per_snap == 0:
            t = step * config.dt
            u = _sfft.ifft2(u_hat)
            if not np.all(np.isfinite(u)):
                raise BlowUpError(t)
            record(env.EnvelopeState(ComplexField(grid, u), carrier, t), step // steps_per_snap)
    return RunResult(config, times, series, surfaces, envelopes)


def load_run(out_dir) -> RunResult:
    """Reload a run directory written by :func:`run` (fields included)."""
    out = Path(out_dir)
    info = json.loads((out / "runinfo.json").read_text())
    config = RunConfig.from_dict(info["config"])
    times = info["times"]
    surfaces, envelopes = [], []
    for i, t in enumerate(times):
        idx = int(round(t / config.snapshot_dt))
        epath = out / _snap_name("eta", idx)
        if epath.exists():
            eta = read_field(epath)
            xi = read_field(out / _snap_name("xi", idx))
            surfaces.append(SurfaceState(eta, xi, t))
        upath = out / _snap_name("u", idx)
        if upath.exists():
            u = read_field(upath)
            envelopes.append(env.EnvelopeState(u, config.carrier, t))
    series = []
    text = (out / "series.csv").read_text().strip().splitlines()
    for line in text[1:]:
        series.append(tuple(float(v) for v in line.split(",")))
    return RunResult(config, times, series, surfaces, envelopes, str(out))


# ---------------------------------------------------------------------------
# Comparison metrics
# ---------------------------------------------------------------------------


@dataclass
class ComparisonReport:
    times: list
    linf: list  # relative L-infinity error on eta per common snapshot
    l2: list  # relative L2 error (double trapezoid) per common snapshot

    def rows(self):
        return list(zip(self.times, self.linf, self.l2))


def compare(run_full: RunResult, run_env: RunResult) -> ComparisonReport:
    """Relative L-infinity and L2 errors on eta at common snapshot times."""
    if run_full.config.grid != run_env.config.grid:
        raise ConfigError("runs live on different grids")
    full_by_t = {round(t, 9): s for t, s in zip(run_full.times, run_full.surfaces)}
    times, linf, l2 = [], [], []
    for t, s in zip(run_env.times, run_env.surfaces):
        key = round(t, 9)
        if key not in full_by_t:
            continue
        f = full_by_t[key]
        diff = f.eta.samples - s.eta.samples
        dA = f.grid.cell_area
        ref_inf = float(np.max(np.abs(f.eta.samples)))
        ref_l2 = math.sqrt(float((f.eta.samples**2).sum() * dA))
        times.append(t)
        linf.append(float(np.max(np.abs(diff))) / ref_inf)
        l2.append(math.sqrt(float((diff**2).sum() * dA)) / ref_l2)
    if not times:
        raise ConfigError("no common snapshot times to compare")
    return ComparisonReport(times, linf, l2)


# ---------------------------------------------------------------------------
# Sideband growth probe
# ---------------------------------------------------------------------------


def mode_amplitude_series(result: RunResult, lam: float, mu: float):
    """|u_hat(lam, mu)| over the snapshots of an envelope run."""
    config = result.config
    grid = config.grid
    j = int(round(lam * grid.lx / (2.0 * math.pi)))
    l = int(round(mu * grid.ly / (2.0 * math.pi)))
    amps = []
    for s in result.envelopes:
        spec = _sfft.fft2(s.u.samples) / (grid.nx * grid.ny)
        amps.append(float(np.abs(spec[j, l])))
    return np.asarray(result.times), np.asarray(amps)


def sideband_growth_probe(result: RunResult, lam: float | None = None, mu: float | None = None):
    """Fit the exponential growth rate of a seeded sideband mode.

    Scans contiguous windows of the log-amplitude series and returns the
    slope of the lowest-residual window with positive growth. Returns
    ``(0.0, False)`` when no exponential window is found (stable case).
    """
    config = result.config
    lam = config.lam if lam is None else lam
    mu = config.mu if mu is None else mu
    times, amps = mode_amplitude_series(result, lam, mu)
    good = amps > 0
    if good.sum() < 8:
        return 0.0, False
    t, la = times[good], np.log(amps[good])
    if la.max() - la[0] < math.log(1.5):
        return 0.0, False
    n = len(t)
    wmin = max(8, n // 6)
    best = None
    for i in range(0, n - wmin):
        for j in range(i + wmin, n + 1, max(1, n // 50)):
            tt, ll = t[i:j], la[i:j]
            a, b = np.polyfit(tt, ll, 1)
            resid = float(np.sqrt(np.mean((ll - (a * tt + b)) ** 2)))
            if a > 0 and (best is None or resid < best[0]):
                best = (resid, float(a))
    if best is None:
        return 0.0, False
    return best[1], True
