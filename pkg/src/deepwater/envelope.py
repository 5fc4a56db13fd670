"""Envelope models for deep-water wavetrains moving along +x.

Four right-hand sides are provided for the slowly varying envelope:

* ``hamiltonian-dysthe``: the Hamiltonian Dysthe equation

      i u_t = w0 u - i (w0/2k0) u_X + (w0/8k0^2) u_XX - (w0/4k0^2) u_YY
              + k0^3 |u|^2 u + i (w0/16k0^3) u_XXX - i (3w0/8k0^3) u_XYY
              - 3i k0^2 |u|^2 u_X + k0^2 u d_X^2 |D|^{-1} |u|^2

  whose linear symbol is the cubic Taylor polynomial of w(k0 + k) about the
  carrier.
* ``nls``: the same with every third-order term dropped.
* ``exact-dispersion``: the linear dispersion kept exact, w(k0 + D) applied
  spectrally, with the same nonlinear terms.
* ``classical-dysthe``: the classical (non-Hamiltonian) Dysthe equation for
  the envelope A riding on the carrier e^{i(k0 x - w0 t)}, including the
  wave-induced mean flow dx Phi = (w0/2) d_x^2 |D|^{-1} |A|^2 and the
  A^2 d_x conj(A) term.

The scale bookkeeping factor ``epsilon`` defaults to 1: amplitudes carry the
scale and the envelope shares the physical grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.fft as _sfft

from .euler3d import BlowUpError
from .spectral import ComplexField, Grid2D, raw_ops

VARIANTS = ("hamiltonian-dysthe", "classical-dysthe", "nls", "exact-dispersion")
FRAMES = ("lab", "moving")


@dataclass(frozen=True)
class CarrierParams:
    """Carrier wavenumber (along +x), gravity, and the scale bookkeeping factor."""

    k0: float
    g: float = 1.0
    epsilon: float = 1.0

    def __post_init__(self):
        if self.k0 <= 0:
            raise ValueError("carrier wavenumber must be positive")
        if self.g <= 0:
            raise ValueError("gravity must be positive")

    @property
    def omega0(self) -> float:
        return float(np.sqrt(self.g * self.k0))

    def check_lattice(self, grid: Grid2D) -> None:
        ratio = self.k0 * grid.lx / (2.0 * np.pi)
        if abs(ratio - round(ratio)) > 1e-9 or round(ratio) <= 0:
            raise ValueError("carrier k0 must be a positive integer multiple of 2*pi/Lx")


@dataclass(frozen=True)
class EnvelopeModel:
    variant: str = "hamiltonian-dysthe"
    frame: str = "lab"

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.frame not in FRAMES:
            raise ValueError(f"unknown frame {self.frame!r}")
        if self.variant == "classical-dysthe" and self.frame == "moving":
            raise ValueError("moving frame is defined for the hamiltonian family only")


@dataclass
class EnvelopeState:
    u: ComplexField
    carrier: CarrierParams
    t: float = 0.0

    @property
    def grid(self) -> Grid2D:
        return self.u.grid

    def copy(self) -> "EnvelopeState":
        return EnvelopeState(self.u.copy(), self.carrier, self.t)


def initial_perturbed_stokes(
    b0: float, lam: float, mu: float, grid: Grid2D, carrier: CarrierParams, factor: float = 0.1
) -> EnvelopeState:
    """u(x, 0) = B0 [1 + 0.1 cos(lam x) cos(mu y)], the perturbed Stokes wave."""
    for val, length, name in ((lam, grid.lx, "lambda"), (mu, grid.ly, "mu")):
        ratio = val * length / (2.0 * np.pi)
        if abs(ratio - round(ratio)) > 1e-9:
            raise ValueError(f"perturbation wavenumber {name}={val} is not on the lattice")
    X, Y = grid.meshes()
    u = b0 * (1.0 + factor * np.cos(lam * X) * np.cos(mu * Y))
    return EnvelopeState(ComplexField(grid, u.astype(complex)), carrier)


def uniform_stokes(b0: float, carrier: CarrierParams, grid: Grid2D, t: float = 0.0) -> EnvelopeState:
    """The uniform progressive Stokes solution u0(t) = B0 e^{-i(w0 + k0^3 B0^2) t}."""
    eps = carrier.epsilon
    phase = -(carrier.omega0 + eps**2 * carrier.k0**3 * b0**2) * t
    u = np.full((grid.nx, grid.ny), b0 * np.exp(1j * phase), dtype=complex)
    return EnvelopeState(ComplexField(grid, u), carrier, t)


# ---------------------------------------------------------------------------
# Linear symbols
# ---------------------------------------------------------------------------


def linear_symbol(variant: str, carrier: CarrierParams, kx, ky):
    """Frequency symbol of the linear part, evaluated at envelope wavenumbers."""
    k0, w0, eps = carrier.k0, carrier.omega0, carrier.epsilon
    kx = np.asarray(kx, dtype=float)
    ky = np.asarray(ky, dtype=float)
    if variant == "exact-dispersion":
        mag = np.hypot(k0 + eps * kx, eps * ky)
        return np.sqrt(carrier.g * mag)
    taylor2 = (
        w0
        + eps * (w0 / (2 * k0)) * kx
        - eps**2 * (w0 / (8 * k0**2)) * kx**2
        + eps**2 * (w0 / (4 * k0**2)) * ky**2
    )
    if variant == "nls":
        sym = taylor2
    else:
        sym = taylor2 + eps**3 * (w0 / (16 * k0**3)) * kx**3 - eps**3 * (3 * w0 / (8 * k0**3)) * kx * ky**2
    if variant == "classical-dysthe":
        sym = sym - w0  # classical envelope rides on e^{i(k0 x - w0 t)}
    return sym


def _frame_shift(carrier: CarrierParams, kx):
    """Symbol removed when passing to the frame moving at the group velocity."""
    w0, k0, eps = carrier.omega0, carrier.k0, carrier.epsilon
    return eps * (w0 / (2 * k0)) * kx + (w0 - k0 * (w0 / (2 * k0)))


@lru_cache(maxsize=None)
def _symbol_full(grid: Grid2D, carrier: CarrierParams, model: EnvelopeModel) -> np.ndarray:
    KX, KY = grid.k_full()
    sym = linear_symbol(model.variant, carrier, KX, KY)
    if model.frame == "moving":
        sym = sym - _frame_shift(carrier, KX)
    return sym


# ---------------------------------------------------------------------------
# Nonlinear terms (dealiased, via the real-transform machinery)
# ---------------------------------------------------------------------------


def _nonlinear_phys(model: EnvelopeModel, carrier: CarrierParams, u: np.ndarray, grid: Grid2D):
    """Physical samples of the nonlinear part of du/dt = -i * (...)."""
    ops = raw_ops(grid)
    plan = ops.plan
    k0, w0, eps = carrier.k0, carrier.omega0, carrier.epsilon
    a, b = np.ascontiguousarray(u.real), np.ascontiguousarray(u.imag)
    raw_ab = ops.to_raw(np.stack([a, b]))
    af, bf = plan.to_fine(raw_ab)
    q_raw = plan.from_fine(af * af + bf * bf)  # |u|^2, dealiased

    classical = model.variant == "classical-dysthe"
    third = model.variant != "nls"
    cubic = 0.5 * w0 * k0**2 if classical else k0**3

    if third:
        # mean-flow multiplier dx^2 |D|^{-1} = -kx^2/|k| on the half lattice
        K = ops.absk
        with np.errstate(divide="ignore", invalid="ignore"):
            msym = np.where(K > 0, np.real(ops.ikx * ops.ikx) / np.where(K > 0, K, 1.0), 0.0)
        mean_coeff = 0.5 * w0 * k0 if classical else k0**2
        stack = np.stack([q_raw, msym * q_raw, ops.ikx * raw_ab[0], ops.ikx * raw_ab[1]])
        qf, mf, uxa, uxb = plan.to_fine(stack)
    else:
        qf = plan.to_fine(q_raw)

    # bracket accumulators: i u_t = ... + bracket
    br_re = eps**2 * cubic * qf * af
    br_im = eps**2 * cubic * qf * bf
    if third:
        grad_coeff = 1.5 * w0 * k0 if classical else 3.0 * k0**2
        # -3i k0^2 |u|^2 u_X  (or -(3i/2) w0 k0 |A|^2 A_x)
        br_re += eps**3 * grad_coeff * qf * uxb
        br_im += -(eps**3) * grad_coeff * qf * uxa
        # u times the mean-flow term
        br_re += eps**3 * mean_coeff * af * mf
        br_im += eps**3 * mean_coeff * bf * mf
        if classical:
            # -(i/4) w0 k0 A^2 dx conj(A), nested: A^2 dealiased, then times conj(A_x)
            a2_re = plan.from_fine(af * af - bf * bf)
            a2_im = plan.from_fine(2.0 * af * bf)
            a2f = plan.to_fine(np.stack([a2_re, a2_im]))
            # conj(A_x) on the fine grid is (uxa, -uxb)
            prod_re = a2f[0] * uxa + a2f[1] * uxb
            prod_im = a2f[1] * uxa - a2f[0] * uxb
            br_re += eps**3 * 0.25 * w0 * k0 * prod_im
            br_im += -(eps**3) * 0.25 * w0 * k0 * prod_re
    raw_out = plan.from_fine(np.stack([br_re, br_im]))
    out = ops.to_phys(raw_out)
    bracket = out[0] + 1j * out[1]
    return -1j * bracket


def _rhs(state: EnvelopeState, model: EnvelopeModel) -> ComplexField:
    grid = state.grid
    sym = _symbol_full(grid, state.carrier, model)
    u_hat = _sfft.fft2(state.u.samples)
    lin = -1j * _sfft.ifft2(sym * u_hat)
    return ComplexField(grid, lin + _nonlinear_phys(model, state.carrier, state.u.samples, grid))


def rhs_hamiltonian_dysthe(state: EnvelopeState) -> ComplexField:
    """du/dt for the Hamiltonian Dysthe equation (lab frame)."""
    return _rhs(state, EnvelopeModel("hamiltonian-dysthe"))


def rhs_classical_dysthe(state: EnvelopeState) -> ComplexField:
    """dA/dt for the classical Dysthe equation (carrier phase k0 x - w0 t)."""
    return _rhs(state, EnvelopeModel("classical-dysthe"))


def rhs_nls(state: EnvelopeState) -> ComplexField:
    """du/dt with every third-order term of the Hamiltonian Dysthe RHS dropped."""
    return _rhs(state, EnvelopeModel("nls"))


def rhs_exact_dispersion(state: EnvelopeState) -> ComplexField:
    """du/dt with the linear dispersion kept exact, w(k0 + D) applied spectrally."""
    return _rhs(state, EnvelopeModel("exact-dispersion"))


RHS_BY_VARIANT = {
    "hamiltonian-dysthe": rhs_hamiltonian_dysthe,
    "classical-dysthe": rhs_classical_dysthe,
    "nls": rhs_nls,
    "exact-dispersion": rhs_exact_dispersion,
}


# ---------------------------------------------------------------------------
# Time stepping
# ---------------------------------------------------------------------------


class EnvelopeSolver:
    """Integrating-factor RK4: exact exponential for the assembled linear
    symbol, RK4 for the nonlinear remainder."""

    def __init__(self, grid: Grid2D, carrier: CarrierParams, model: EnvelopeModel, dt: float):
        if dt <= 0:
            raise ValueError("dt must be positive")
        carrier.check_lattice(grid)
        self.grid = grid
        self.carrier = carrier
        self.model = model
        self.dt = dt
        sym = _symbol_full(grid, carrier, model)
        self.e_half = np.exp(-1j * sym * (0.5 * dt))
        self.e_full = np.exp(-1j * sym * dt)

    def _nl(self, u_hat: np.ndarray) -> np.ndarray:
        u = _sfft.ifft2(u_hat)
        return _sfft.fft2(_nonlinear_phys(self.model, self.carrier, u, self.grid))

    def step_raw(self, u_hat: np.ndarray) -> np.ndarray:
        dt = self.dt
        E2, E1 = self.e_half, self.e_full
        r1 = self._nl(u_hat)
        r2 = self._nl(E2 * (u_hat + 0.5 * dt * r1))
        h = E2 * u_hat
        r3 = self._nl(h + 0.5 * dt * r2)
        r4 = self._nl(E2 * (h + dt * r3))
        return E1 * u_hat + dt / 6.0 * (E1 * r1 + 2.0 * E2 * (r2 + r3) + r4)

    def step(self, state: EnvelopeState) -> EnvelopeState:
        u_hat = _sfft.fft2(state.u.samples)
        u_new = _sfft.ifft2(self.step_raw(u_hat))
        t_new = state.t + self.dt
        if not np.all(np.isfinite(u_new)):
            raise BlowUpError(t_new)
        return EnvelopeState(ComplexField(self.grid, u_new), state.carrier, t_new)


def step_envelope(state: EnvelopeState, model: EnvelopeModel, dt: float) -> EnvelopeState:
    """Advance one step (convenience wrapper around a cached solver)."""
    key = (state.grid, state.carrier, model, dt)
    solver = _solver_cache.get(key)
    if solver is None:
        solver = _solver_cache[key] = EnvelopeSolver(state.grid, state.carrier, model, dt)
    return solver.step(state)


_solver_cache: dict = {}


# ---------------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------------


def _derivs(state: EnvelopeState):
    grid = state.grid
    KX, KY = grid.k_full()
    u_hat = _sfft.fft2(state.u.samples)
    ux = _sfft.ifft2(1j * KX * u_hat)
    uy = _sfft.ifft2(1j * KY * u_hat)
    return u_hat, ux, uy, KX, KY


def hamiltonian_envelope(state: EnvelopeState) -> float:
    """Reduced Hamiltonian of the envelope flow, double-trapezoid quadrature.

    Every term through third order is evaluated with spectral derivatives;
    the nonlocal operator d_X^2 |D|^{-1} is a single symbol, 0 at k = 0.
    """
    c = state.carrier
    k0, w0, eps = c.k0, c.omega0, c.epsilon
    u = state.u.samples
    u_hat, ux, uy, KX, KY = _derivs(state)
    grid = state.grid
    q = np.abs(u) ** 2

    uxx = _sfft.ifft2(-(KX**2) * u_hat)
    uyy = _sfft.ifft2(-(KY**2) * u_hat)
    K = np.hypot(KX, KY)
    with np.errstate(divide="ignore", invalid="ignore"):
        msym = np.where(K > 0, -(KX**2) / np.where(K > 0, K, 1.0), 0.0)
    mean = np.real(_sfft.ifft2(msym * _sfft.fft2(q)))

    dens = (
        w0 * q
        + eps * (w0 / (2 * k0)) * np.imag(np.conj(u) * ux)
        - eps**2 * (w0 / (8 * k0**2)) * np.abs(ux) ** 2
        + eps**2 * (w0 / (4 * k0**2)) * np.abs(uy) ** 2
        + eps**2 * (k0**3 / 2.0) * q**2
        + eps**3 * (w0 / (16 * k0**3)) * np.imag(np.conj(ux) * uxx)
        - eps**3 * (3 * w0 / (8 * k0**3)) * np.imag(np.conj(ux) * uyy)
        + eps**3 * (3 * k0**2 / 2.0) * q * np.imag(np.conj(u) * ux)
        + eps**3 * (k0**2 / 2.0) * q * mean
    )
    return float(dens.sum() * grid.cell_area)


def wave_action(state: EnvelopeState) -> float:
    """M = integral of |u|^2."""
    return float((np.abs(state.u.samples) ** 2).sum() * state.grid.cell_area)


def impulse(state: EnvelopeState) -> tuple[float, float]:
    """I = integral of (k0, 0) |u|^2 + eps Im(conj(u) grad u)."""
    c = state.carrier
    _, ux, uy, _, _ = _derivs(state)
    u = state.u.samples
    q = np.abs(u) ** 2
    dA = state.grid.cell_area
    ix = (c.k0 * q + c.epsilon * np.imag(np.conj(u) * ux)).sum() * dA
    iy = (c.epsilon * np.imag(np.conj(u) * uy)).sum() * dA
    return float(ix), float(iy)


def hamiltonian_moving_frame(state: EnvelopeState) -> float:
    """H minus the group-velocity multiple of the impulse and the action multiple."""
    c = state.carrier
    w0, k0 = c.omega0, c.k0
    h = hamiltonian_envelope(state)
    ix, _ = impulse(state)
    m = wave_action(state)
    cg = w0 / (2 * k0)
    return h - cg * ix - (w0 - k0 * cg) * m
