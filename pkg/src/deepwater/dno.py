"""Taylor-series evaluation of the Dirichlet-Neumann operator on deep water.

``G(eta)`` maps the surface trace of the velocity potential to its scaled
normal derivative at the free surface and expands as ``sum_m G^(m)(eta)``
with ``G^(m)`` homogeneous of degree m in the elevation.

The first three terms are evaluated from their explicit operator formulas.
Higher orders come from the self-consistent deep-water recursion obtained by
demanding that the series reproduce, order by order in the amplitude, the
exact identity

    G(eta) e^{i k.x + |k| eta} = (|k| - i k.grad eta) e^{i k.x + |k| eta}

for every lattice wavenumber k (the trace of the decaying harmonic function
``e^{i k.x + |k| z}``). ``dno_exact_on_harmonic_trace`` exposes that identity
as a verification oracle.

All products are dealiased with nested pairwise 3/2 padding; no smoothing is
applied to the elevation.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .spectral import (
    ComplexField,
    Grid2D,
    GridMismatchError,
    RawOps,
    RealField,
    raw_ops,
)

MAX_ORDER = 6


@dataclass(frozen=True)
class DnoConfig:
    """Series truncation order (number of terms beyond G^(0)) and gravity."""

    order: int = 4
    g: float = 1.0

    def __post_init__(self):
        if not (0 <= self.order <= MAX_ORDER):
            raise ValueError(f"DNO order must be in [0, {MAX_ORDER}], got {self.order}")
        if self.g <= 0:
            raise ValueError("gravity must be positive")


# ---------------------------------------------------------------------------
# Raw-spectrum workhorses (shared with the full Euler solver)
# ---------------------------------------------------------------------------


def _eta_powers_fine(ops: RawOps, raw_eta: np.ndarray, max_pow: int) -> list[np.ndarray]:
    """Fine-grid samples of nested dealiased powers eta^j, j = 0..max_pow."""
    plan = ops.plan
    pows = [np.ones(plan.fine_shape)]
    if max_pow >= 1:
        p1 = plan.to_fine(raw_eta)
        pows.append(p1)
        for _ in range(2, max_pow + 1):
            raw = plan.from_fine(pows[-1] * p1)
            pows.append(plan.to_fine(raw))
    return pows


def _potential_terms(
    ops: RawOps, pow_fine: list[np.ndarray], raw_xi: np.ndarray, order: int
) -> list[np.ndarray]:
    """Taylor terms b_n of the z=0 potential solving xi = sum_j (eta^j/j!)|D|^j phi0."""
    plan, K = ops.plan, ops.absk
    b = [raw_xi]
    for n in range(1, order + 1):
        stack = plan.to_fine(np.stack([ops.kpow[j] * b[n - j] for j in range(1, n + 1)]))
        acc = np.zeros(plan.fine_shape)
        for j in range(1, n + 1):
            acc += pow_fine[j] / factorial(j) * stack[j - 1]
        b.append(-plan.from_fine(acc))
    return b


def _terms_raw(ops: RawOps, raw_eta: np.ndarray, raw_xi: np.ndarray, order: int) -> list[np.ndarray]:
    """Raw spectra of G^(m)(eta) xi for m = 0..order via the recursion."""
    plan, K = ops.plan, ops.absk
    pow_fine = _eta_powers_fine(ops, raw_eta, order)
    b = _potential_terms(ops, pow_fine, raw_xi, order)
    grad_eta = plan.to_fine(np.stack([ops.ikx * raw_eta, ops.iky * raw_eta]))
    out = []
    for m in range(order + 1):
        stack = plan.to_fine(np.stack([ops.kpow[j + 1] * b[m - j] for j in range(m + 1)]))
        acc = np.zeros(plan.fine_shape)
        for j in range(m + 1):
            acc += pow_fine[j] / factorial(j) * stack[j]
        term = plan.from_fine(acc)
        if m >= 1:
            gx = plan.to_fine(np.stack([ops.kpow[j] * ops.ikx * b[m - 1 - j] for j in range(m)]))
            gy = plan.to_fine(np.stack([ops.kpow[j] * ops.iky * b[m - 1 - j] for j in range(m)]))
            wx = np.zeros(plan.fine_shape)
            wy = np.zeros(plan.fine_shape)
            for j in range(m):
                c = 1.0 / factorial(j)
                wx += c * pow_fine[j] * gx[j]
                wy += c * pow_fine[j] * gy[j]
            term = term - plan.from_fine(grad_eta[0] * wx + grad_eta[1] * wy)
        out.append(term)
    return out


def _apply_impl(ops: RawOps, raw_eta, raw_xi, order: int, want_grad_eta: bool):
    """One-pass series sum; optionally also returns grad(eta) on the fine grid."""
    plan = ops.plan
    pow_fine = _eta_powers_fine(ops, raw_eta, order)
    b = _potential_terms(ops, pow_fine, raw_xi, order)
    # cumulative sums S_p = b_0 + ... + b_p
    cum = [b[0]]
    for n in range(1, order + 1):
        cum.append(cum[-1] + b[n])
    stack = plan.to_fine(np.stack([ops.kpow[j + 1] * cum[order - j] for j in range(order + 1)]))
    acc = np.zeros(plan.fine_shape)
    for j in range(order + 1):
        acc += pow_fine[j] / factorial(j) * stack[j]
    out = plan.from_fine(acc)
    grad_eta = None
    if order >= 1 or want_grad_eta:
        gfine = plan.to_fine(np.stack([ops.ikx * raw_eta, ops.iky * raw_eta]))
        grad_eta = (gfine[0], gfine[1])
    if order >= 1:
        grads = plan.to_fine(
            np.stack(
                [ops.kpow[j] * ops.ikx * cum[order - 1 - j] for j in range(order)]
                + [ops.kpow[j] * ops.iky * cum[order - 1 - j] for j in range(order)]
            )
        )
        wx = np.zeros(plan.fine_shape)
        wy = np.zeros(plan.fine_shape)
        for j in range(order):
            c = 1.0 / factorial(j)
            wx += c * pow_fine[j] * grads[j]
            wy += c * pow_fine[j] * grads[order + j]
        out = out - plan.from_fine(grad_eta[0] * wx + grad_eta[1] * wy)
    return out, grad_eta


def dno_apply_raw(ops: RawOps, raw_eta: np.ndarray, raw_xi: np.ndarray, order: int) -> np.ndarray:
    """Raw spectrum of sum_{m<=order} G^(m)(eta) xi, assembled in one pass."""
    out, _ = _apply_impl(ops, raw_eta, raw_xi, order, want_grad_eta=False)
    return out


def dno_apply_with_grad(ops: RawOps, raw_eta, raw_xi, order: int):
    """Series sum plus the fine-grid samples of grad(eta), for solver reuse."""
    return _apply_impl(ops, raw_eta, raw_xi, order, want_grad_eta=True)


# explicit low-order formulas ------------------------------------------------


def _g0_raw(ops: RawOps, raw_xi: np.ndarray) -> np.ndarray:
    return ops.absk * raw_xi


def _g1_raw(ops: RawOps, raw_eta: np.ndarray, raw_xi: np.ndarray) -> np.ndarray:
    # D.eta D - G0 eta G0, with D.eta D xi = -div(eta grad xi)
    K, ikx, iky = ops.absk, ops.ikx, ops.iky
    tx = ops.product(raw_eta, ikx * raw_xi)
    ty = ops.product(raw_eta, iky * raw_xi)
    t0 = ops.product(raw_eta, K * raw_xi)
    return -(ikx * tx + iky * ty) - K * t0


def _g2_raw(ops: RawOps, raw_eta: np.ndarray, raw_xi: np.ndarray) -> np.ndarray:
    # -(1/2) (|D|^2 eta^2 G0 + G0 eta^2 |D|^2 - 2 G0 eta G0 eta G0)
    K = ops.absk
    raw_eta2 = ops.product(raw_eta, raw_eta)
    a = K**2 * ops.product(raw_eta2, K * raw_xi)
    bb = K * ops.product(raw_eta2, K**2 * raw_xi)
    inner = ops.product(raw_eta, K * raw_xi)
    c = K * ops.product(raw_eta, K * inner)
    return -0.5 * (a + bb - 2.0 * c)


# ---------------------------------------------------------------------------
# Public field-level API
# ---------------------------------------------------------------------------


def _check_pair(eta: RealField, xi: RealField) -> Grid2D:
    if eta.grid != xi.grid:
        raise GridMismatchError("eta and xi live on different grids")
    return eta.grid


def dno_term(m: int, eta: RealField, xi: RealField, cfg: DnoConfig = DnoConfig()) -> RealField:
    """G^(m)(eta) xi: the degree-m Taylor term of the operator."""
    if m < 0 or m > cfg.order:
        raise ValueError(f"term index {m} outside [0, {cfg.order}]")
    grid = _check_pair(eta, xi)
    ops = raw_ops(grid)
    raw_eta = ops.to_raw(eta.samples)
    raw_xi = ops.to_raw(xi.samples)
    if m == 0:
        raw = _g0_raw(ops, raw_xi)
    elif m == 1:
        raw = _g1_raw(ops, raw_eta, raw_xi)
    elif m == 2:
        raw = _g2_raw(ops, raw_eta, raw_xi)
    else:
        raw = _terms_raw(ops, raw_eta, raw_xi, m)[m]
    return RealField(grid, ops.to_phys(raw))


def dno_apply(eta: RealField, xi: RealField, cfg: DnoConfig = DnoConfig()) -> RealField:
    """Truncated series sum_{m=0}^{order} G^(m)(eta) xi."""
    grid = _check_pair(eta, xi)
    ops = raw_ops(grid)
    raw = dno_apply_raw(ops, ops.to_raw(eta.samples), ops.to_raw(xi.samples), cfg.order)
    return RealField(grid, ops.to_phys(raw))


def dno_exact_on_harmonic_trace(eta: RealField, k) -> tuple[ComplexField, ComplexField]:
    """Exact DNO input/output pair built from a decaying harmonic function.

    For phi(x, z) = e^{i k.x + |k| z} the surface trace is
    xi = e^{i k.x + |k| eta} and the exact operator output is
    (|k| - i k.grad eta) e^{i k.x + |k| eta}. Linearity lets real tests take
    real parts.
    """
    kx, ky = float(k[0]), float(k[1])
    mag = np.hypot(kx, ky)
    if mag == 0.0:
        raise ValueError("oracle requires a nonzero wavenumber")
    grid = eta.grid
    ops = raw_ops(grid)
    X, Y = grid.meshes()
    raw_eta = ops.to_raw(eta.samples)
    ex = ops.to_phys(ops.ikx * raw_eta)
    ey = ops.to_phys(ops.iky * raw_eta)
    trace = np.exp(1j * (kx * X + ky * Y) + mag * eta.samples)
    out = (mag - 1j * (kx * ex + ky * ey)) * trace
    return ComplexField(grid, trace), ComplexField(grid, out)
