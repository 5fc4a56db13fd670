"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The long simulations (full-solver energy conservation, the t = 250 model
comparison, envelope invariants, dynamic sideband growth) are produced once
by a session fixture that schedules them across two worker processes and
hands the artifacts over via run directories. Budget about an hour of wall
time for the whole module; everything else is seconds.

Run with ``pytest tests/test_acceptance.py -v -s``.
"""

import math
from concurrent.futures import ProcessPoolExecutor

import numpy as np
import pytest

from deepwater.dno import DnoConfig, dno_apply, dno_exact_on_harmonic_trace
from deepwater.envelope import CarrierParams, EnvelopeModel, EnvelopeSolver, uniform_stokes
from deepwater.harness import RunConfig, compare, load_run, run, sideband_growth_probe
from deepwater.normalform import (
    d123_forms,
    homogenized_coeff,
    random_zero_sum_chis,
    t2_parts_near_carrier,
    verify_T1_expansion,
)
from deepwater.reconstruct import burgers_flow, envelope_to_surface_linear, reconstruct_hamiltonian, tilde
from deepwater.spectral import Grid2D, RealField
from deepwater.stability import StabilityQuery, band_edges, build_stability_map, growth_rate_eig

from conftest import band_limited_field

K0 = 10.0
A0_FROM_B0 = 0.003 * (4 * K0) ** 0.25  # classical-route amplitude matching B0 = 0.003


def report(num: int, name: str, ok: bool, detail: str) -> None:
    print(f"\nACCEPTANCE {num:02d} {name}: {'PASS' if ok else 'FAIL'} ({detail})")


# ---------------------------------------------------------------------------
# Heavy simulations, scheduled once for the session
# ---------------------------------------------------------------------------

HEAVY_BASE = dict(nx=256, ny=32, k0=10.0, g=1.0)

HEAVY_JOBS = {
    # criterion 3: pinned resolution and step
    "full_t50": dict(model="full", dt=0.005, t_end=50.0, snapshot_dt=5.0,
                     b0=0.003, a0=None, lam=1.0, mu=1.0),
    # criterion 11: full vs Hamiltonian-Dysthe (Burgers-route initial data)
    "full_ham": dict(model="full", dt=0.01, t_end=250.0, snapshot_dt=25.0,
                     b0=0.003, a0=None, lam=1.0, mu=1.0),
    # criterion 11: full vs classical Dysthe (Stokes-route initial data)
    "full_cl": dict(model="full", dt=0.01, t_end=250.0, snapshot_dt=25.0,
                    b0=None, a0=A0_FROM_B0, lam=1.0, mu=1.0),
    "ham_t250": dict(model="hamiltonian-dysthe", dt=0.02, t_end=250.0, snapshot_dt=25.0,
                     b0=0.003, a0=None, lam=1.0, mu=1.0),
    "cl_t250": dict(model="classical-dysthe", dt=0.02, t_end=250.0, snapshot_dt=25.0,
                    b0=None, a0=A0_FROM_B0, lam=1.0, mu=1.0),
    # criterion 4: envelope invariants over t = 100
    "env_t100": dict(model="hamiltonian-dysthe", dt=0.005, t_end=100.0, snapshot_dt=10.0,
                     b0=0.003, a0=None, lam=1.0, mu=1.0),
    # criterion 8: seeded sideband growth at the larger amplitude. The
    # dynamics is y-independent (mu = 0), so a narrow grid suffices; the
    # small seed (1% of B0) leaves ~40x of linear growth before saturation,
    # and the t > 250 stretch is past the eigenvector transient.
    "growth": dict(model="hamiltonian-dysthe", dt=0.01, t_end=420.0, snapshot_dt=0.5,
                   b0=0.0035, a0=None, lam=1.0, mu=0.0, perturbation=0.01, ny=8),
}


def _heavy_job(arg):
    name, out_dir = arg
    cfg = RunConfig(**{**HEAVY_BASE, **HEAVY_JOBS[name]})
    run(cfg, out_dir=out_dir, keep_fields=False,
        reconstruct_surfaces=(name != "growth"))
    return name


@pytest.fixture(scope="session")
def heavy_runs(tmp_path_factory):
    base = tmp_path_factory.mktemp("acceptance_runs")
    # longest first so two workers stay busy
    order = ["full_ham", "full_cl", "full_t50", "growth", "env_t100", "ham_t250", "cl_t250"]
    args = [(name, str(base / name)) for name in order]
    with ProcessPoolExecutor(max_workers=2) as ex:
        list(ex.map(_heavy_job, args))
    return {name: load_run(base / name) for name in order}


# ---------------------------------------------------------------------------
# Criteria
# ---------------------------------------------------------------------------


def test_01_stokes_solution_exactness():
    """Uniform envelope evolved 10 carrier periods matches the analytic
    rotating solution to 1e-8 relative."""
    grid = Grid2D(64, 32)
    carrier = CarrierParams(k0=K0)
    b0 = 0.003
    period = 2 * math.pi / carrier.omega0
    n = 2000
    solver = EnvelopeSolver(grid, carrier, EnvelopeModel("hamiltonian-dysthe"), 10 * period / n)
    st = uniform_stokes(b0, carrier, grid)
    for _ in range(n):
        st = solver.step(st)
    exact = uniform_stokes(b0, carrier, grid, st.t)
    err = float(np.max(np.abs(st.u.samples - exact.u.samples)) / b0)
    ok = err <= 1e-8
    report(1, "stokes-solution-exactness", ok, f"rel err {err:.3e} <= 1e-8")
    assert ok


def test_02_dno_oracle_convergence():
    """Truncation error vs the harmonic-trace oracle scales as a^(M+1) for
    M = 2, 3, 4 (slope within 0.2)."""
    grid = Grid2D(64, 32)
    rng = np.random.default_rng(42)
    eta0 = band_limited_field(grid, rng, scale=1.0, kmax=3)
    k = grid.lattice_mode(2, 1)
    details = []
    ok = True
    for M in (2, 3, 4):
        # the M = 4 error dips below the float64 floor near a = 1e-3, so its
        # window sits one step higher within the same decade
        amps = np.array([2e-3, 4e-3, 8e-3, 1.6e-2]) if M == 4 else np.array([1e-3, 2e-3, 4e-3, 8e-3])
        errs = []
        for a in amps:
            eta = RealField(grid, a * eta0.samples)
            trace, exact = dno_exact_on_harmonic_trace(eta, k)
            gr = dno_apply(eta, RealField(grid, trace.samples.real), DnoConfig(order=M))
            gi = dno_apply(eta, RealField(grid, trace.samples.imag), DnoConfig(order=M))
            errs.append(np.max(np.abs(gr.samples + 1j * gi.samples - exact.samples)))
        slope = float(np.polyfit(np.log(amps), np.log(errs), 1)[0])
        details.append(f"M={M}: slope {slope:.2f}")
        ok = ok and abs(slope - (M + 1)) <= 0.2
    report(2, "dno-oracle-convergence", ok, "; ".join(details))
    assert ok


def test_03_full_solver_energy_conservation(heavy_runs):
    """|dH/H0| <= 1e-6 up to t = 50 at Nx=256, Ny=32, dt=0.005."""
    res = heavy_runs["full_t50"]
    drift = max(row[2] for row in res.series)
    ok = drift <= 1e-6
    report(3, "full-solver-energy-conservation", ok, f"max |dH/H0| {drift:.3e} <= 1e-6")
    assert ok


def test_04_envelope_invariants(heavy_runs):
    """H, M, Ix, Iy each drift <= 1e-5 relative over t = 100."""
    res = heavy_runs["env_t100"]
    rows = np.asarray(res.series)
    t, h, m, ix, iy = rows[:, 0], rows[:, 1], rows[:, 2], rows[:, 3], rows[:, 4]
    drifts = {
        "H": np.max(np.abs(h - h[0])) / abs(h[0]),
        "M": np.max(np.abs(m - m[0])) / abs(m[0]),
        "Ix": np.max(np.abs(ix - ix[0])) / abs(ix[0]),
        # Iy starts at 0; scale by the impulse magnitude instead
        "Iy": np.max(np.abs(iy - iy[0])) / abs(ix[0]),
    }
    ok = all(v <= 1e-5 for v in drifts.values())
    detail = ", ".join(f"{k} {v:.2e}" for k, v in drifts.items())
    report(4, "envelope-invariants", ok, detail + " (each <= 1e-5)")
    assert ok


def test_05_stability_band_edges():
    """Dysthe edge 1.918364, NLS edge 2.133936 (each to 1e-5); Dysthe band
    strictly inside the NLS band."""
    (lo_d, hi_d), = band_edges(StabilityQuery(0.003, K0))
    (lo_n, hi_n), = band_edges(StabilityQuery(0.003, K0, eps=0.0))
    ok = (
        abs(hi_d - 1.918364) <= 1e-5
        and abs(hi_n - 2.133936) <= 1e-5
        and hi_d < hi_n
        and lo_d == 0.0
    )
    report(5, "stability-band-edges", ok,
           f"dysthe {hi_d:.6f} vs 1.918364, nls {hi_n:.6f} vs 2.133936, contained={hi_d < hi_n}")
    assert ok


def test_06_maximum_growth_location():
    """argmax of the eigenvalue growth over mu = 0 lies in [1.3, 1.6]; the
    NLS argmax reproduces the analytic 1.5091 to 1e-3."""
    lams = np.linspace(0.8, 2.2, 2801)
    rates = [growth_rate_eig(StabilityQuery(0.003, K0, lam=L, mu=0.0)) for L in lams]
    lam_star = float(lams[int(np.argmax(rates))])
    lams_n = np.linspace(1.3, 1.7, 4001)
    rates_n = [growth_rate_eig(StabilityQuery(0.003, K0, lam=L, mu=0.0), "nls") for L in lams_n]
    lam_star_n = float(lams_n[int(np.argmax(rates_n))])
    analytic = math.sqrt(8 * K0**5 * 0.003**2 / math.sqrt(K0))
    ok = 1.3 <= lam_star <= 1.6 and abs(lam_star_n - analytic) <= 1e-3
    report(6, "maximum-growth-location", ok,
           f"dysthe argmax {lam_star:.4f} in [1.3, 1.6]; nls argmax {lam_star_n:.4f} vs {analytic:.4f}")
    assert ok


def test_07_sign_agreement_raster():
    """bf_condition and growth_rate_eig agree on every interior cell of a
    200x100 raster for both parameter sets."""
    results = []
    ok = True
    for b0 in (0.003, 0.0035):
        sm = build_stability_map(b0, K0, n_lam=200, n_mu=100)
        u = sm.unstable
        interior = np.zeros_like(u)
        interior[1:-1, 1:-1] = (
            (u[:-2, 1:-1] == u[1:-1, 1:-1])
            & (u[2:, 1:-1] == u[1:-1, 1:-1])
            & (u[1:-1, :-2] == u[1:-1, 1:-1])
            & (u[1:-1, 2:] == u[1:-1, 1:-1])
        )
        grown = sm.growth > 1e-10
        agree = np.all(grown[interior] == u[interior])
        results.append(f"B0={b0}: {int(interior.sum())} interior cells, agree={bool(agree)}")
        ok = ok and bool(agree)
    report(7, "sign-agreement-raster", ok, "; ".join(results))
    assert ok


def test_08_dynamic_sideband_growth(heavy_runs):
    """Measured growth of the seeded (1, 0) sideband in the B0 = 0.0035 run
    matches the eigenvalue prediction within 10%."""
    res = heavy_runs["growth"]
    rate, grew = sideband_growth_probe(res)
    predicted = growth_rate_eig(StabilityQuery(0.0035, K0, lam=1.0, mu=0.0))
    ok = grew and abs(rate - predicted) / predicted <= 0.10
    report(8, "dynamic-sideband-growth", ok,
           f"measured {rate:.4e} vs predicted {predicted:.4e} "
           f"(ratio {rate / predicted if predicted else float('nan'):.3f}, within 10%)")
    assert ok


def test_09_homogenization_constant():
    """T1 - T2/2 converges to k0^3/(8 pi^2) with slope 1 +- 0.2; the three
    forms of d123 agree to 1e-12 on 1e4 random triples."""
    rng = np.random.default_rng(7)
    chis = random_zero_sum_chis(rng, 20)
    target = K0**3 / (8 * math.pi**2)
    eps_values = np.array([4e-3, 2e-3, 1e-3, 5e-4])
    errs = [
        max(abs(homogenized_coeff(K0, chis[i], eps) - target) for i in range(len(chis)))
        for eps in eps_values
    ]
    slope = float(np.polyfit(np.log(eps_values), np.log(errs), 1)[0])
    # d123 three-form agreement on 10^4 zero-sum triples
    k1 = rng.uniform(-3, 3, (10_000, 2))
    k2 = rng.uniform(-3, 3, (10_000, 2))
    k3 = -(k1 + k2)
    keep = (np.hypot(*k1.T) > 1e-3) & (np.hypot(*k2.T) > 1e-3) & (np.hypot(*k3.T) > 1e-3)
    f1, f2, f3 = d123_forms(k1[keep], k2[keep], k3[keep])
    dev = float(np.max(np.maximum(np.abs(f1 - f2), np.abs(f1 - f3)) / np.abs(f1)))
    ok = abs(slope - 1.0) <= 0.2 and errs[-1] <= 1e-3 * target and dev <= 1e-12
    report(9, "homogenization-constant", ok,
           f"limit err {errs[-1]:.2e}, slope {slope:.3f} in [0.8, 1.2], "
           f"d123 max rel dev {dev:.2e} <= 1e-12 on {int(keep.sum())} triples")
    assert ok


def test_10_burgers_reconstruction():
    """Forward-backward auxiliary flow round trip <= 1e-10 on B0=0.003-scale
    data; reconstructed carrier amplitude obeys A0/B0 = (4 k0/g)^(1/4)
    within 1%."""
    grid = Grid2D(256, 32)
    carrier = CarrierParams(k0=K0)
    from deepwater.envelope import initial_perturbed_stokes

    st = initial_perturbed_stokes(0.003, 1, 1, grid, carrier)
    tp = tilde(envelope_to_surface_linear(st))
    fwd = burgers_flow(tp, 0.0, -1.0, 0.005)
    back = burgers_flow(fwd, -1.0, 0.0, 0.005)
    rt = max(
        float(np.max(np.abs(back.eta_t.samples - tp.eta_t.samples))),
        float(np.max(np.abs(back.xi_t.samples - tp.xi_t.samples))),
    )
    surf = reconstruct_hamiltonian(uniform_stokes(0.003, carrier, grid))
    spec = np.fft.fft2(surf.eta.samples) / (grid.nx * grid.ny)
    amp = 2.0 * float(np.abs(spec[10, 0]))
    ratio = amp / 0.003
    expected = (4 * K0) ** 0.25
    ok = rt <= 1e-10 and abs(ratio - expected) / expected <= 0.01
    report(10, "burgers-reconstruction", ok,
           f"round trip {rt:.2e} <= 1e-10; A0/B0 {ratio:.5f} vs {expected:.5f} within 1%")
    assert ok


def test_11_model_comparison(heavy_runs):
    """Desk-scale comparison at B0 = 0.003, t = 250, Nx = 256: relative L2
    error of the Hamiltonian Dysthe surface <= 0.05, and never more than
    1.2x the classical Dysthe error at any common snapshot."""
    rep_ham = compare(heavy_runs["full_ham"], heavy_runs["ham_t250"])
    rep_cl = compare(heavy_runs["full_cl"], heavy_runs["cl_t250"])
    final_l2 = rep_ham.l2[-1]
    margins = [
        (t, h, c)
        for t, h, c in zip(rep_ham.times, rep_ham.l2, rep_cl.l2)
        if h > 1.2 * c + 1e-12
    ]
    ok = final_l2 <= 0.05 and not margins
    report(11, "model-comparison", ok,
           f"final L2 {final_l2:.4f} <= 0.05; ham <= 1.2x classical at all "
           f"{len(rep_ham.times)} snapshots (violations: {margins})")
    assert ok


def test_12_expansion_lemma_checks():
    """T1 expansion residual slope >= 1.8; parts I and III converge to
    (sqrt(2)-1) k0^3/16pi^2 and -(sqrt(2)+1) k0^3/16pi^2."""
    rep = verify_T1_expansion(K0, n_quads=100, seed=5)
    rng = np.random.default_rng(11)
    chis = random_zero_sum_chis(rng, 1)[0]
    tgt_i = (math.sqrt(2) - 1) * K0**3 / (16 * math.pi**2)
    tgt_iii = -(math.sqrt(2) + 1) * K0**3 / (16 * math.pi**2)
    p1 = t2_parts_near_carrier(K0, chis, 2e-3).parts
    p2 = t2_parts_near_carrier(K0, chis, 1e-3).parts
    rich_i = 2 * p2["I"] - p1["I"]
    rich_iii = 2 * p2["III"] - p1["III"]
    ok = (
        rep.slope >= 1.8
        and abs(rich_i - tgt_i) <= 1e-3 * abs(tgt_i)
        and abs(rich_iii - tgt_iii) <= 1e-3 * abs(tgt_iii)
    )
    report(12, "expansion-lemma-checks", ok,
           f"T1 slope {rep.slope:.2f} >= 1.8; I -> {rich_i:.5f} (target {tgt_i:.5f}), "
           f"III -> {rich_iii:.5f} (target {tgt_iii:.5f})")
    assert ok
