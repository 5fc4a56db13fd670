"""Maps between envelope and physical surface variables.

Two routes are provided:

* the complex-symplectic route: the envelope rides the carrier,
  z(x) = u(x) e^{i k0 x}; the linear change of variables gives (eta, xi)
  mode by mode, and the cubic normal form is inverted non-perturbatively by
  integrating a Burgers pair in Hilbert-transformed variables from s = 0
  to s = -1;
* the classical route: the textbook Stokes expansion through third
  harmonics, with the wave-induced mean flow, evaluated at the state's time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft as _sfft

from .envelope import CarrierParams, EnvelopeState
from .euler3d import BlowUpError, SurfaceState
from .spectral import (
    ComplexField,
    Grid2D,
    RealField,
    apply_multiplier,
    hilbert_x,
    inv_hilbert_x,
    raw_ops,
)


@dataclass
class ComplexModalField:
    """The complex symplectic coordinate z in physical space."""

    z: ComplexField
    carrier: CarrierParams

    @property
    def grid(self) -> Grid2D:
        return self.z.grid


@dataclass
class TildePair:
    """Hilbert-x-transformed elevation/trace pair along the auxiliary flow.

    Both fields are real with zero x-mean (kx = 0 content annihilated).
    """

    eta_t: RealField
    xi_t: RealField
    s: float = 0.0

    @property
    def grid(self) -> Grid2D:
        return self.eta_t.grid


def _weights(grid: Grid2D, g: float):
    """Half-spectrum a_k = (g/|k|)^(1/4) with a placeholder at k = 0."""
    ops = raw_ops(grid)
    K = ops.absk
    with np.errstate(divide="ignore"):
        a = np.where(K > 0, (g / np.where(K > 0, K, 1.0)) ** 0.25, 1.0)
    return a


def envelope_to_surface_linear(state: EnvelopeState) -> SurfaceState:
    """Invert the complex symplectic coordinates mode by mode.

    z(x) = u(x) e^{i k0 x}; for k != 0,
    eta_k = (z_k + conj(z_{-k})) / (sqrt(2) a_k) and
    xi_k  = a_k (z_k - conj(z_{-k})) / (i sqrt(2)); both zero modes are set
    to 0 (the weight is singular there and the modulational content lives
    near the carrier). The output pair is real by construction.
    """
    grid = state.grid
    c = state.carrier
    c.check_lattice(grid)
    X, _ = grid.meshes()
    z = state.u.samples * np.exp(1j * c.k0 * X)
    z_hat = _sfft.fft2(z) / (grid.nx * grid.ny)
    # conj(z_{-k}) on the full lattice
    z_neg = np.conj(np.roll(z_hat[::-1, ::-1], 1, axis=(0, 1)))
    KX, KY = grid.k_full()
    K = np.hypot(KX, KY)
    with np.errstate(divide="ignore"):
        a = np.where(K > 0, (c.g / np.where(K > 0, K, 1.0)) ** 0.25, 1.0)
    eta_hat = (z_hat + z_neg) / (np.sqrt(2.0) * a)
    xi_hat = a * (z_hat - z_neg) / (1j * np.sqrt(2.0))
    eta_hat[0, 0] = 0.0
    xi_hat[0, 0] = 0.0
    eta = np.real(_sfft.ifft2(eta_hat) * (grid.nx * grid.ny))
    xi = np.real(_sfft.ifft2(xi_hat) * (grid.nx * grid.ny))
    return SurfaceState(RealField(grid, eta), RealField(grid, xi), state.t)


def modal_from_surface(s: SurfaceState, carrier: CarrierParams) -> ComplexModalField:
    """Forward linear map to the complex symplectic coordinate (diagnostic;
    the nonlinear surface -> envelope extraction is out of scope)."""
    grid = s.grid
    eta_hat = _sfft.fft2(s.eta.samples) / (grid.nx * grid.ny)
    xi_hat = _sfft.fft2(s.xi.samples) / (grid.nx * grid.ny)
    KX, KY = grid.k_full()
    K = np.hypot(KX, KY)
    with np.errstate(divide="ignore"):
        a = np.where(K > 0, (carrier.g / np.where(K > 0, K, 1.0)) ** 0.25, 1.0)
    z_hat = (a * eta_hat + 1j * xi_hat / a) / np.sqrt(2.0)
    z_hat[0, 0] = 0.0
    z = _sfft.ifft2(z_hat) * (grid.nx * grid.ny)
    return ComplexModalField(ComplexField(grid, z), carrier)


def tilde(s: SurfaceState) -> TildePair:
    """Hilbert x-transform of the pair; kx = 0 content annihilated."""
    h = hilbert_x(s.grid)
    return TildePair(apply_multiplier(s.eta, h), apply_multiplier(s.xi, h), 0.0)


def untilde(tp: TildePair, t: float = 0.0) -> SurfaceState:
    """Inverse Hilbert x-transform; kx = 0 content annihilated both ways."""
    h = inv_hilbert_x(tp.grid)
    return SurfaceState(apply_multiplier(tp.eta_t, h), apply_multiplier(tp.xi_t, h), t)


def _burgers_rhs(ops, raw_eta, raw_xi):
    """d/ds of the pair: (-(1/2) dx(eta~^2), -eta~ dx xi~), dealiased.

    The elevation equation is advanced in conservation form so the spatial
    integral of eta~ is conserved exactly as computed.
    """
    plan = ops.plan
    fine = plan.to_fine(np.stack([raw_eta, ops.ikx * raw_xi]))
    eta_f, xix_f = fine
    prods = plan.from_fine(np.stack([eta_f * eta_f, eta_f * xix_f]))
    return -0.5 * ops.ikx * prods[0], -prods[1]


def burgers_flow(tp: TildePair, s_from: float, s_to: float, ds: float) -> TildePair:
    """Integrate the auxiliary Burgers pair from s_from to s_to by RK4.

    ``ds`` is the step magnitude; the sign follows the flow direction.
    Shock formation surfaces as a blow-up error.
    """
    if ds <= 0:
        raise ValueError("ds must be positive")
    grid = tp.grid
    ops = raw_ops(grid)
    total = s_to - s_from
    n = max(1, int(round(abs(total) / ds)))
    h = total / n
    re = ops.to_raw(tp.eta_t.samples)
    rx = ops.to_raw(tp.xi_t.samples)
    s = s_from
    for _ in range(n):
        k1 = _burgers_rhs(ops, re, rx)
        k2 = _burgers_rhs(ops, re + 0.5 * h * k1[0], rx + 0.5 * h * k1[1])
        k3 = _burgers_rhs(ops, re + 0.5 * h * k2[0], rx + 0.5 * h * k2[1])
        k4 = _burgers_rhs(ops, re + h * k3[0], rx + h * k3[1])
        re = re + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        rx = rx + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        s += h
        if not (np.all(np.isfinite(re)) and np.all(np.isfinite(rx))):
            raise BlowUpError(s)
    eta_t = RealField(grid, ops.to_phys(re))
    xi_t = RealField(grid, ops.to_phys(rx))
    return TildePair(eta_t, xi_t, s_to)


def reconstruct_hamiltonian(state: EnvelopeState, ds: float = 0.005) -> SurfaceState:
    """Non-perturbative surface reconstruction.

    Linear symplectic map, Hilbert transform, auxiliary Burgers flow from
    s = 0 to s = -1 (initial conditions are the transformed variables),
    inverse Hilbert transform. This initializes the full solver and converts
    envelope snapshots for comparison.
    """
    lin = envelope_to_surface_linear(state)
    tp = tilde(lin)
    tp = burgers_flow(tp, 0.0, -1.0, ds)
    return untilde(tp, state.t)


def reconstruct_classical(state: EnvelopeState) -> SurfaceState:
    """Perturbative Stokes reconstruction through third harmonics.

    The envelope A rides on theta = k0 x - w0 t with the state's time. The
    potential keeps the printed first-harmonic and mean-flow terms, with
    e^{k0 z} evaluated pointwise at z = eta; xi(x) = phi(x, eta(x)).
    """
    grid = state.grid
    c = state.carrier
    c.check_lattice(grid)
    k0, w0 = c.k0, c.omega0
    A = state.u.samples
    X, _ = grid.meshes()
    theta = k0 * X - w0 * state.t
    eik = np.exp(1j * theta)

    KX, KY = grid.k_full()
    A_hat = _sfft.fft2(A)
    Ax = _sfft.ifft2(1j * KX * A_hat)
    Axx = _sfft.ifft2(-(KX**2) * A_hat)
    Ayy = _sfft.ifft2(-(KY**2) * A_hat)
    q = np.abs(A) ** 2
    K = np.hypot(KX, KY)
    with np.errstate(divide="ignore"):
        inv_k = np.where(K > 0, 1.0 / np.where(K > 0, K, 1.0), 0.0)
    q_hat = _sfft.fft2(q)
    # Phi = (w0/2) dx |D|^{-1} |A|^2 and its x-derivative
    phi_mean = 0.5 * w0 * np.real(_sfft.ifft2(1j * KX * inv_k * q_hat))
    phi_mean_x = 0.5 * w0 * np.real(_sfft.ifft2(-(KX**2) * inv_k * q_hat))

    eta = phi_mean_x / (2.0 * w0) + np.real(
        A * eik
        + 0.5 * (k0 * A**2 - 1j * A * Ax) * eik**2
        + 0.375 * k0**2 * A**3 * eik**3
    )

    amp = (
        -1j * w0 / k0 * A
        + w0 / (2.0 * k0**2) * Ax
        + 3j * w0 / (8.0 * k0**3) * Axx
        - 1j * w0 / (4.0 * k0**3) * Ayy
        + 1j / 8.0 * w0 * k0 * q * A
    )
    xi = phi_mean + np.real(amp * eik * np.exp(k0 * eta))
    return SurfaceState(RealField(grid, eta), RealField(grid, np.real(xi)), state.t)
