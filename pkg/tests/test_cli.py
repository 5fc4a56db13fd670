"""CLI surface: subcommands, artifacts, exit codes."""

import json

import numpy as np
import pytest

from deepwater.cli import main
from deepwater.snapshots import read_field


@pytest.fixture
def outdir(tmp_path):
    return tmp_path


def test_simulate_envelope_writes_artifacts(outdir):
    rc = main(["simulate-envelope", "--preset", "smoke", "--out", str(outdir / "env")])
    assert rc == 0
    assert (outdir / "env/series.csv").exists()
    assert (outdir / "env/runinfo.json").exists()
    assert (outdir / "env/u_00002.dwf").exists()
    header = (outdir / "env/series.csv").read_text().splitlines()[0]
    assert header == "t,H,M,Ix,Iy,relative_dH"


def test_simulate_full_and_compare(outdir):
    assert main(["simulate-full", "--preset", "smoke", "--out", str(outdir / "full")]) == 0
    header = (outdir / "full/series.csv").read_text().splitlines()[0]
    assert header == "t,H,relative_dH,eta_max,eta_min"
    assert main(["simulate-envelope", "--preset", "smoke", "--out", str(outdir / "env")]) == 0
    rc = main([
        "compare", "--full", str(outdir / "full"), "--envelope", str(outdir / "env"),
        "--out", str(outdir / "cmp"),
    ])
    assert rc == 0
    lines = (outdir / "cmp/errors.csv").read_text().splitlines()
    assert lines[0] == "t,linf,l2"
    assert len(lines) == 4  # three snapshots


def test_reconstruct_subcommand(outdir):
    main(["simulate-envelope", "--preset", "smoke", "--out", str(outdir / "env")])
    rc = main([
        "reconstruct", str(outdir / "env/u_00002.dwf"), "--k0", "4", "--out",
        str(outdir / "rec"), "--cross-section",
    ])
    assert rc == 0
    eta = read_field(outdir / "rec/eta.dwf")
    assert np.all(np.isfinite(eta.samples))
    assert (outdir / "rec/eta_section.csv").read_text().splitlines()[0] == "x,value"


def test_stability_map_artifacts(outdir):
    rc = main(["stability-map", "--out", str(outdir / "sm"), "--n-lam", "30", "--n-mu", "10"])
    assert rc == 0
    lines = (outdir / "sm/stability_map.csv").read_text().splitlines()
    assert lines[0] == "lambda,mu,unstable,growth"
    assert len(lines) == 1 + 30 * 10
    assert (outdir / "sm/growth.pgm").read_text().startswith("P2")
    assert (outdir / "sm/band_edges.csv").read_text().splitlines()[0] == "mu,lam_lo,lam_hi"


def test_verify_coeffs_artifacts(outdir):
    rc = main(["verify-coeffs", "--out", str(outdir / "vc"), "--seed", "3"])
    assert rc == 0
    lines = (outdir / "vc/coeffs.csv").read_text().splitlines()
    assert lines[0] == "epsilon,residual,slope"
    slope = float(lines[1].split(",")[2])
    assert 0.8 <= slope <= 1.2


def test_probe_growth_stable(outdir, capsys):
    rc = main(["probe-growth", "--preset", "smoke"])
    assert rc == 0
    assert "stable" in capsys.readouterr().out


def test_config_error_exit_code(outdir):
    bad = outdir / "bad.json"
    bad.write_text(json.dumps({"model": "bogus"}))
    assert main(["simulate-envelope", "--config", str(bad)]) == 2


def test_unknown_key_exit_code(outdir):
    bad = outdir / "bad.json"
    bad.write_text(json.dumps({"frobnicate": 1}))
    assert main(["simulate-envelope", "--config", str(bad)]) == 2


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_blow_up_exit_code(outdir):
    cfg = outdir / "blow.json"
    cfg.write_text(json.dumps({
        "Nx": 64, "Ny": 16, "dt": 0.2, "t_end": 40.0, "snapshot_dt": 1.0,
        "model": "full", "k0": 4.0, "g": 1.0, "B0": 0.2,
        "lambda": 1.0, "mu": 1.0, "dno_order": 4,
    }))
    assert main(["simulate-full", "--config", str(cfg)]) == 3
