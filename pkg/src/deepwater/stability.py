"""Benjamin-Feir (modulational) stability of uniform wavetrains.

The closed-form instability condition for a sideband (lam, mu) on the
envelope flow is

    (lam^2/2 - mu^2) [ 2 k0^2 B0^2 (k0 - eps lam^2 / sqrt(lam^2 + mu^2))
                       - (w0 / 4 k0^2) (lam^2/2 - mu^2) ] > 0 .

An independent eigenvalue route linearizes the chosen envelope right-hand
side about the uniform Stokes solution on the basis
{e^{i(lam X + mu Y)}, e^{-i(lam X + mu Y)}} and reports the largest real
part; the two routes cross-validate each other and the envelope
implementations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .envelope import CarrierParams, linear_symbol


@dataclass(frozen=True)
class StabilityQuery:
    b0: float
    k0: float
    g: float = 1.0
    eps: float = 1.0
    lam: float = 0.0
    mu: float = 0.0

    def __post_init__(self):
        if self.b0 <= 0 or self.k0 <= 0:
            raise ValueError("B0 and k0 must be positive")

    @property
    def omega0(self) -> float:
        return float(np.sqrt(self.g * self.k0))

    @property
    def carrier(self) -> CarrierParams:
        return CarrierParams(self.k0, self.g, self.eps)


def _condition_value(q: StabilityQuery, lam: float, mu: float) -> float:
    """Signed value of the instability condition (positive = unstable)."""
    first = 0.5 * lam**2 - mu**2
    kap = np.hypot(lam, mu)
    bracket = 2.0 * q.k0**2 * q.b0**2 * (q.k0 - q.eps * lam**2 / kap) - (
        q.omega0 / (4.0 * q.k0**2)
    ) * first
    return first * bracket


def bf_condition(q: StabilityQuery) -> bool:
    """True iff the sideband (lam, mu) is linearly unstable."""
    if q.lam == 0.0 and q.mu == 0.0:
        raise ValueError("instability condition is undefined at the origin")
    return bool(_condition_value(q, q.lam, q.mu) > 0.0)


def band_edges(q: StabilityQuery, mu: float = 0.0, lam_max: float = 10.0) -> list[tuple[float, float]]:
    """Intervals of unstable lam > 0 at fixed mu.

    At mu = 0 the edge is the positive root of the quadratic
    lam^2 + (16 eps k0^4 B0^2 / w0) lam - 16 k0^5 B0^2 / w0 = 0 (closed
    form); for general mu sign changes are located by bisection.
    """
    if mu == 0.0:
        b = 16.0 * q.eps * q.k0**4 * q.b0**2 / q.omega0
        c = 16.0 * q.k0**5 * q.b0**2 / q.omega0
        lam_c = 0.5 * (-b + np.sqrt(b**2 + 4.0 * c))
        return [(0.0, float(lam_c))]
    ngrid = 4000
    lams = np.linspace(lam_max / ngrid, lam_max, ngrid)
    vals = np.array([_condition_value(q, L, mu) for L in lams])
    intervals = []
    sign = vals > 0
    edges = np.nonzero(np.diff(sign))[0]

    def refine(lo, hi):
        flo = _condition_value(q, lo, mu)
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            fm = _condition_value(q, mid, mu)
            if (fm > 0) == (flo > 0):
                lo, flo = mid, fm
            else:
                hi = mid
        return 0.5 * (lo + hi)

    crossings = [refine(lams[i], lams[i + 1]) for i in edges]
    bounds = [0.0] + crossings + [lam_max]
    for i in range(len(bounds) - 1):
        mid = 0.5 * (bounds[i] + bounds[i + 1])
        if mid > 0 and _condition_value(q, mid, mu) > 0:
            intervals.append((float(bounds[i]), float(bounds[i + 1])))
    return intervals


def _mode_matrix(q: StabilityQuery, variant: str) -> np.ndarray:
    """2x2 linearization of the envelope RHS about the uniform Stokes
    solution, in the frame rotating with it, on the sideband basis."""
    lam, mu = q.lam, q.mu
    carrier = q.carrier
    k0, w0, eps, b0 = q.k0, q.omega0, q.eps, q.b0
    om_p = float(linear_symbol(variant, carrier, lam, mu))
    om_m = float(linear_symbol(variant, carrier, -lam, -mu))
    om_0 = float(linear_symbol(variant, carrier, 0.0, 0.0))
    d_p, d_m = om_p - om_0, om_m - om_0

    kap = np.hypot(lam, mu)
    mean_sym = -(lam**2) / kap if kap > 0 else 0.0

    if variant == "classical-dysthe":
        cubic = 0.5 * w0 * k0**2 * b0**2
        coupling = cubic + eps * 0.5 * w0 * k0 * b0**2 * mean_sym
        grad = eps * 1.5 * w0 * k0 * b0**2 * lam
        skew = eps * 0.25 * w0 * k0 * b0**2 * lam
        a11 = -1j * (d_p + grad + coupling)
        a12 = -1j * (coupling + skew)
        a21 = 1j * (coupling - skew)
        a22 = 1j * (d_m - grad + coupling)
        return np.array([[a11, a12], [a21, a22]])

    third = variant != "nls"
    coupling = k0**3 * b0**2 + (eps * k0**2 * b0**2 * mean_sym if third else 0.0)
    grad = eps * 3.0 * k0**2 * b0**2 * lam if third else 0.0
    a11 = -1j * (d_p + grad + coupling)
    a12 = -1j * coupling
    a21 = 1j * coupling
    a22 = 1j * (d_m - grad + coupling)
    return np.array([[a11, a12], [a21, a22]])


def growth_rate_eig(q: StabilityQuery, variant: str = "hamiltonian-dysthe") -> float:
    """Largest real part of the sideband eigenvalues (0 for stable modes)."""
    if q.lam == 0.0 and q.mu == 0.0:
        return 0.0
    eigs = np.linalg.eigvals(_mode_matrix(q, variant))
    return float(np.max(np.real(eigs)))


def amplitude_relation(k0: float, g: float = 1.0, a0: float | None = None, b0: float | None = None):
    """Convert between the surface amplitude A0 and the envelope amplitude B0.

    B0 = A0 (g/4k0)^(1/4). Returns (a0, b0, steepness) with the wave
    steepness k0 A0.
    """
    if (a0 is None) == (b0 is None):
        raise ValueError("provide exactly one of a0, b0")
    w = (g / (4.0 * k0)) ** 0.25
    if a0 is None:
        a0 = b0 / w
    else:
        b0 = a0 * w
    return float(a0), float(b0), float(k0 * a0)


@dataclass
class StabilityMap:
    """Instability raster over sideband space.

    The boolean raster comes from the closed-form condition, the growth
    raster from the eigenvalue route; the two agree in sign away from the
    boundary cells of the condition's zero set.
    """

    lams: np.ndarray
    mus: np.ndarray
    unstable: np.ndarray  # bool, shape (n_lam, n_mu)
    growth: np.ndarray  # float, same shape
    argmax: tuple[float, float]


def build_stability_map(
    b0: float,
    k0: float,
    g: float = 1.0,
    eps: float = 1.0,
    lam_range=(0.02, 4.0),
    mu_range=(0.0, 2.0),
    n_lam: int = 200,
    n_mu: int = 100,
    variant: str = "hamiltonian-dysthe",
) -> StabilityMap:
    lams = np.linspace(lam_range[0], lam_range[1], n_lam)
    mus = np.linspace(mu_range[0], mu_range[1], n_mu)
    unstable = np.zeros((n_lam, n_mu), dtype=bool)
    growth = np.zeros((n_lam, n_mu))
    for i, L in enumerate(lams):
        for j, M in enumerate(mus):
            qq = StabilityQuery(b0, k0, g, eps, L, M)
            unstable[i, j] = bf_condition(qq)
            growth[i, j] = growth_rate_eig(qq, variant)
    imax = np.unravel_index(np.argmax(growth), growth.shape)
    return StabilityMap(lams, mus, unstable, growth, (float(lams[imax[0]]), float(mus[imax[1]])))
