"""Envelope <-> surface maps: linear change of variables, Burgers flow,
Stokes expansion."""

import numpy as np
import pytest

from deepwater.envelope import CarrierParams, EnvelopeState, initial_perturbed_stokes, uniform_stokes
from deepwater.reconstruct import (
    TildePair,
    burgers_flow,
    envelope_to_surface_linear,
    modal_from_surface,
    reconstruct_classical,
    reconstruct_hamiltonian,
    tilde,
    untilde,
)
from deepwater.euler3d import SurfaceState
from deepwater.spectral import ComplexField, Grid2D, RealField, hermitian_residual

K0 = 10.0
B0 = 0.003


@pytest.fixture
def bigger_grid():
    return Grid2D(256, 32)


@pytest.fixture
def carrier():
    return CarrierParams(k0=K0)


def mode_amp(field, j, l=0):
    grid = field.grid
    spec = np.fft.fft2(field.samples) / (grid.nx * grid.ny)
    return 2.0 * np.abs(spec[j, l])


class TestLinearMap:
    def test_uniform_envelope_amplitudes(self, bigger_grid, carrier):
        s = envelope_to_surface_linear(uniform_stokes(B0, carrier, bigger_grid))
        X, _ = bigger_grid.meshes()
        a0 = np.sqrt(2.0) * (K0 / carrier.g) ** 0.25 * B0
        assert np.max(np.abs(s.eta.samples - a0 * np.cos(K0 * X))) < 1e-15
        # trace amplitude of the linear progressive wave: A0 w0 / k0
        xi_amp = a0 * carrier.omega0 / K0
        assert np.max(np.abs(s.xi.samples - xi_amp * np.sin(K0 * X))) < 1e-15

    def test_zero_envelope(self, bigger_grid, carrier):
        s = envelope_to_surface_linear(EnvelopeState(ComplexField.zeros(bigger_grid), carrier))
        assert np.max(np.abs(s.eta.samples)) == 0.0
        assert np.max(np.abs(s.xi.samples)) == 0.0

    def test_round_trip_with_forward_map(self, bigger_grid, carrier):
        st = initial_perturbed_stokes(B0, 1, 1, bigger_grid, carrier)
        s = envelope_to_surface_linear(st)
        m = modal_from_surface(s, carrier)
        X, _ = bigger_grid.meshes()
        z_expected = st.u.samples * np.exp(1j * K0 * X)
        assert np.max(np.abs(m.z.samples - z_expected)) < 1e-12 * B0

    def test_outputs_real(self, bigger_grid, carrier):
        st = initial_perturbed_stokes(B0, 2, 1, bigger_grid, carrier)
        s = envelope_to_surface_linear(st)
        assert hermitian_residual(s.eta) < 1e-12
        assert hermitian_residual(s.xi) < 1e-12


class TestTilde:
    def test_cos_to_sin(self, grid):
        s = SurfaceState(RealField.from_function(grid, lambda X, Y: np.cos(X)), RealField.zeros(grid))
        tp = tilde(s)
        X, _ = grid.meshes()
        assert np.max(np.abs(tp.eta_t.samples - np.sin(X))) < 1e-13

    def test_untilde_inverts_on_nonzero_kx(self, grid, rng):
        from conftest import band_limited_field

        eta = band_limited_field(grid, rng)
        # remove kx = 0 content so the pair is invertible
        spec = np.fft.fft2(eta.samples)
        spec[0, :] = 0.0
        eta = RealField(grid, np.fft.ifft2(spec).real)
        s = SurfaceState(eta, eta.copy())
        back = untilde(tilde(s))
        assert np.max(np.abs(back.eta.samples - eta.samples)) < 1e-12

    def test_y_only_field_annihilated(self, grid):
        s = SurfaceState(RealField.from_function(grid, lambda X, Y: np.cos(Y)), RealField.zeros(grid))
        tp = tilde(s)
        assert np.max(np.abs(tp.eta_t.samples)) < 1e-14


class TestBurgersFlow:
    def test_x_constant_fixed_point(self, grid):
        tp = TildePair(
            RealField.from_function(grid, lambda X, Y: 0.01 * np.cos(Y)), RealField.zeros(grid)
        )
        out = burgers_flow(tp, 0.0, -1.0, 0.01)
        assert np.max(np.abs(out.eta_t.samples - tp.eta_t.samples)) < 1e-14

    def test_forward_backward_round_trip(self, bigger_grid, carrier):
        st = initial_perturbed_stokes(B0, 1, 1, bigger_grid, carrier)
        tp = tilde(envelope_to_surface_linear(st))
        fwd = burgers_flow(tp, 0.0, -1.0, 0.005)
        back = burgers_flow(fwd, -1.0, 0.0, 0.005)
        assert np.max(np.abs(back.eta_t.samples - tp.eta_t.samples)) <= 1e-10
        assert np.max(np.abs(back.xi_t.samples - tp.xi_t.samples)) <= 1e-10

    def test_second_harmonic_generation(self, grid):
        a = 1e-2
        tp = TildePair(RealField.from_function(grid, lambda X, Y: a * np.sin(X)), RealField.zeros(grid))
        out = burgers_flow(tp, 0.0, 1.0, 0.005)
        assert mode_amp(out.eta_t, 2) == pytest.approx(a**2 / 2, rel=5e-2)

    def test_mean_conserved(self, bigger_grid, carrier):
        st = initial_perturbed_stokes(B0, 1, 1, bigger_grid, carrier)
        tp = tilde(envelope_to_surface_linear(st))
        out = burgers_flow(tp, 0.0, -1.0, 0.005)
        m0 = tp.eta_t.integrate()
        m1 = out.eta_t.integrate()
        assert abs(m1 - m0) <= 1e-12


class TestHamiltonianRoute:
    def test_zero_envelope(self, bigger_grid, carrier):
        s = reconstruct_hamiltonian(EnvelopeState(ComplexField.zeros(bigger_grid), carrier))
        assert np.max(np.abs(s.eta.samples)) == 0.0

    def test_carrier_amplitude_within_one_percent(self, bigger_grid, carrier):
        s = reconstruct_hamiltonian(uniform_stokes(B0, carrier, bigger_grid))
        a0 = np.sqrt(2.0) * (K0 / carrier.g) ** 0.25 * B0
        assert mode_amp(s.eta, 10) == pytest.approx(a0, rel=1e-2)

    def test_reality(self, bigger_grid, carrier):
        s = reconstruct_hamiltonian(initial_perturbed_stokes(B0, 1, 1, bigger_grid, carrier))
        assert hermitian_residual(s.eta) < 1e-11
        assert hermitian_residual(s.xi) < 1e-11


class TestClassicalRoute:
    def test_second_and_third_harmonics(self, bigger_grid, carrier):
        a0 = 0.0075
        st = EnvelopeState(
            ComplexField(bigger_grid, np.full((256, 32), a0, dtype=complex)), carrier
        )
        s = reconstruct_classical(st)
        assert mode_amp(s.eta, 20) == pytest.approx(0.5 * K0 * a0**2, rel=1e-10)
        assert mode_amp(s.eta, 20) == pytest.approx(2.8125e-4, rel=1e-6)
        assert mode_amp(s.eta, 30) == pytest.approx(0.375 * K0**2 * a0**3, rel=1e-10)
        assert mode_amp(s.eta, 30) == pytest.approx(1.582e-5, rel=1e-3)

    def test_zero_envelope(self, bigger_grid, carrier):
        s = reconstruct_classical(EnvelopeState(ComplexField.zeros(bigger_grid), carrier))
        assert np.max(np.abs(s.eta.samples)) == 0.0

    def test_routes_agree_on_first_harmonic(self, bigger_grid, carrier):
        """Relative first-harmonic difference between the Burgers and Stokes
        routes decays as B0^2."""
        diffs = []
        b0s = [4e-3, 2e-3, 1e-3]
        for b in b0s:
            sh = reconstruct_hamiltonian(uniform_stokes(b, carrier, bigger_grid))
            a0 = b * (4 * K0 / carrier.g) ** 0.25
            sc = reconstruct_classical(
                EnvelopeState(ComplexField(bigger_grid, np.full((256, 32), a0, dtype=complex)), carrier)
            )
            c1 = mode_amp(sh.eta, 10)
            c2 = mode_amp(sc.eta, 10)
            diffs.append(abs(c1 - c2) / c1)
        slope = np.polyfit(np.log(b0s), np.log(diffs), 1)[0]
        assert abs(slope - 2.0) < 0.2
