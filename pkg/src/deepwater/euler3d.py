"""Time integration of the full surface Euler system on deep water.

The evolution of the canonical pair (eta, xi) is

    d/dt eta = G(eta) xi
    d/dt xi  = -g eta - |grad xi|^2 / 2
               + (G(eta) xi + grad eta . grad xi)^2 / (2 (1 + |grad eta|^2))

with G the Dirichlet-Neumann operator. The linear part (eta_t = |D| xi,
xi_t = -g eta) is solved exactly per mode by a 2x2 rotation with frequency
omega_k = sqrt(g |k|) (integrating factor); the nonlinear residual is
integrated by classical RK4 in the transformed variables. All products are
dealiased; the division by 1 + |grad eta|^2 is pointwise in physical space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dno import DnoConfig, dno_apply_raw, dno_apply_with_grad
from .spectral import Grid2D, RawOps, RealField, raw_ops


class BlowUpError(RuntimeError):
    """Non-finite values encountered while stepping."""

    def __init__(self, t: float):
        super().__init__(f"blow-up at t={t:g}")
        self.t = t


@dataclass
class SurfaceState:
    """Surface elevation and potential trace at time t (shared grid, both real)."""

    eta: RealField
    xi: RealField
    t: float = 0.0

    def __post_init__(self):
        if self.eta.grid != self.xi.grid:
            raise ValueError("eta and xi must share a grid")

    @property
    def grid(self) -> Grid2D:
        return self.eta.grid

    def copy(self) -> "SurfaceState":
        return SurfaceState(self.eta.copy(), self.xi.copy(), self.t)


@dataclass(frozen=True)
class FullSolverConfig:
    dno: DnoConfig = DnoConfig()
    dt: float = 0.005
    g: float = 1.0

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.g <= 0:
            raise ValueError("gravity must be positive")


def _rhs_raw(ops: RawOps, raw_eta, raw_xi, cfg: FullSolverConfig):
    """Raw half-spectra of (d/dt eta, d/dt xi)."""
    plan = ops.plan
    G, (etax, etay) = dno_apply_with_grad(ops, raw_eta, raw_xi, cfg.dno.order)

    fine = plan.to_fine(np.stack([ops.ikx * raw_xi, ops.iky * raw_xi]))
    xix, xiy = fine
    prods = plan.from_fine(
        np.stack([xix * xix + xiy * xiy, etax * etax + etay * etay, etax * xix + etay * xiy])
    )
    grad_xi_sq, grad_eta_sq, dot = prods
    num = dot + G  # G xi + grad eta . grad xi
    num_sq = plan.from_fine(plan.to_fine(num) ** 2)

    # pointwise division on the base grid
    phys = ops.to_phys(np.stack([num_sq, grad_eta_sq]))
    quot_raw = ops.to_raw(phys[0] / (1.0 + phys[1]))

    deta = G
    dxi = -cfg.g * raw_eta - 0.5 * grad_xi_sq + 0.5 * quot_raw
    return deta, dxi


def rhs_full(state: SurfaceState, cfg: FullSolverConfig) -> tuple[RealField, RealField]:
    """Right-hand side of the surface Euler system at the given state."""
    ops = raw_ops(state.grid)
    deta, dxi = _rhs_raw(ops, ops.to_raw(state.eta.samples), ops.to_raw(state.xi.samples), cfg)
    return RealField(state.grid, ops.to_phys(deta)), RealField(state.grid, ops.to_phys(dxi))


class FullSolver:
    """Integrating-factor RK4 stepper for the full system.

    A solver instance is bound to one grid and config; it caches the
    mode-wise linear propagators. Instances are not shareable mid-step but
    distinct instances can run concurrently.
    """

    def __init__(self, grid: Grid2D, cfg: FullSolverConfig):
        self.grid = grid
        self.cfg = cfg
        self.ops = raw_ops(grid)
        self._prop_half = self._propagator(0.5 * cfg.dt)
        self._prop_full = self._propagator(cfg.dt)

    def _propagator(self, tau: float):
        """Entries of exp(tau L) for the linear pair system, per mode.

        [eta']   [ cos(w tau)            sqrt(|k|/g) sin(w tau) ] [eta]
        [xi' ] = [ -sqrt(g/|k|) sin(w tau)  cos(w tau)          ] [xi ]

        with w = sqrt(g |k|); the k = 0 mode degenerates to eta' = eta,
        xi' = xi - g tau eta.
        """
        g = self.cfg.g
        K = self.ops.absk
        w = np.sqrt(g * K)
        c = np.cos(w * tau)
        with np.errstate(divide="ignore", invalid="ignore"):
            b = np.where(K > 0, np.sqrt(np.where(K > 0, K, 1.0) / g) * np.sin(w * tau), 0.0)
            cc = np.where(
                K > 0, -np.sqrt(g / np.where(K > 0, K, 1.0)) * np.sin(w * tau), -g * tau
            )
        return c, b, cc

    def _apply_prop(self, prop, raw_eta, raw_xi):
        c, b, cc = prop
        return c * raw_eta + b * raw_xi, cc * raw_eta + c * raw_xi

    def step_raw(self, raw_eta, raw_xi):
        """One IF-RK4 step on raw half-spectra; returns the advanced pair."""
        dt = self.cfg.dt
        E2 = self._prop_half
        E1 = self._prop_full
        cfg = self.cfg
        ops = self.ops

        k1e, k1x = _rhs_nonlinear(ops, raw_eta, raw_xi, cfg)

        ae, ax = self._apply_prop(E2, raw_eta + 0.5 * dt * k1e, raw_xi + 0.5 * dt * k1x)
        r2e, r2x = _rhs_nonlinear(ops, ae, ax, cfg)
        he, hx = self._apply_prop(E2, raw_eta, raw_xi)
        k2e, k2x = r2e, r2x

        be, bx = he + 0.5 * dt * k2e, hx + 0.5 * dt * k2x
        r3e, r3x = _rhs_nonlinear(ops, be, bx, cfg)
        k3e, k3x = r3e, r3x

        ce, cx = self._apply_prop(E2, he + dt * k3e, hx + dt * k3x)
        r4e, r4x = _rhs_nonlinear(ops, ce, cx, cfg)

        fe, fx = self._apply_prop(E1, raw_eta, raw_xi)
        k1e, k1x = self._apply_prop(E1, k1e, k1x)
        k2e, k2x = self._apply_prop(E2, k2e, k2x)
        k3e, k3x = self._apply_prop(E2, k3e, k3x)

        new_eta = fe + dt / 6.0 * (k1e + 2.0 * k2e + 2.0 * k3e + r4e)
        new_xi = fx + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + r4x)
        return new_eta, new_xi

    def step(self, state: SurfaceState) -> SurfaceState:
        ops = self.ops
        raw_eta = ops.to_raw(state.eta.samples)
        raw_xi = ops.to_raw(state.xi.samples)
        ne, nx_ = self.step_raw(raw_eta, raw_xi)
        eta = ops.to_phys(ne)
        xi = ops.to_phys(nx_)
        t_new = state.t + self.cfg.dt
        if not (np.all(np.isfinite(eta)) and np.all(np.isfinite(xi))):
            raise BlowUpError(t_new)
        return SurfaceState(RealField(self.grid, eta), RealField(self.grid, xi), t_new)


def _rhs_nonlinear(ops: RawOps, raw_eta, raw_xi, cfg: FullSolverConfig):
    """Nonlinear residual: full rhs minus the linear pair (|D| xi, -g eta)."""
    deta, dxi = _rhs_raw(ops, raw_eta, raw_xi, cfg)
    return deta - ops.absk * raw_xi, dxi + cfg.g * raw_eta


def step_full(state: SurfaceState, cfg: FullSolverConfig) -> SurfaceState:
    """Advance one time step (convenience wrapper; reuses a cached solver)."""
    solver = _solver_cache_get(state.grid, cfg)
    return solver.step(state)


_solver_cache: dict = {}


def _solver_cache_get(grid: Grid2D, cfg: FullSolverConfig) -> FullSolver:
    key = (grid, cfg)
    if key not in _solver_cache:
        _solver_cache[key] = FullSolver(grid, cfg)
    return _solver_cache[key]


def hamiltonian_full(state: SurfaceState, cfg: FullSolverConfig) -> float:
    """Total energy (1/2) integral of (xi G(eta) xi + g eta^2)."""
    ops = raw_ops(state.grid)
    raw_eta = ops.to_raw(state.eta.samples)
    raw_xi = ops.to_raw(state.xi.samples)
    G = ops.to_phys(dno_apply_raw(ops, raw_eta, raw_xi, cfg.dno.order))
    dens = state.xi.samples * G + cfg.g * state.eta.samples**2
    return float(0.5 * dens.sum() * state.grid.cell_area)
