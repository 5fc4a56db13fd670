"""Kernels of the third-order normal form and quartic interaction coefficients.

These are pure scalar functions of wavenumber tuples, evaluated on demand.
They certify the coefficient algebra behind the envelope equation (the
homogenized quartic coefficient, the expansion lemmas, the split-scaled
corrections of the reconstruction flow); the solver pipeline itself never
tabulates them.

Conventions: wavenumbers are 2-vectors (broadcastable arrays of shape
(..., 2)); the momentum constraint k1 + ... + kn = 0 lives in the integrals,
so callers hand in zero-sum tuples where a formula assumes it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

TWO_PI_SQ = 2.0 * np.pi**2


class ResonantQuadError(ValueError):
    """Raised on resonant/degenerate quads where a kernel denominator vanishes."""


def _vec(k) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    if k.shape[-1] != 2:
        raise ValueError("wavenumbers are 2-vectors")
    return k


def _mag(k) -> np.ndarray:
    k = _vec(k)
    return np.hypot(k[..., 0], k[..., 1])


def _dot(a, b) -> np.ndarray:
    a, b = _vec(a), _vec(b)
    return a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1]


def _omega(k, g: float) -> np.ndarray:
    return np.sqrt(g * _mag(k))


# ---------------------------------------------------------------------------
# Resonance denominator
# ---------------------------------------------------------------------------


def d123_forms(k1, k2, k3, g: float = 1.0):
    """The three printed forms of the cubic resonance denominator.

    The dot-product form assumes k1 + k2 + k3 = 0; the other two hold
    unconditionally.
    """
    w1, w2, w3 = _omega(k1, g), _omega(k2, g), _omega(k3, g)
    f1 = (w1 + w2 + w3) * (w1 + w2 - w3) * (w1 - w2 + w3) * (w1 - w2 - w3)
    m1, m2, m3 = _mag(k1), _mag(k2), _mag(k3)
    f2 = g**2 * (m1**2 + m2**2 + m3**2 - 2 * m1 * m2 - 2 * m2 * m3 - 2 * m1 * m3)
    f3 = -2.0 * g**2 * (
        _dot(k1, k2) + _dot(k2, k3) + _dot(k3, k1) + m1 * m2 + m2 * m3 + m3 * m1
    )
    return f1, f2, f3


def denom_d123(k1, k2, k3, g: float = 1.0):
    """Resonance denominator d_123, asserting agreement of its three forms.

    Inputs must be nonzero and sum to zero (the setting in which the three
    printed forms coincide).
    """
    if np.any(_mag(k1) == 0) or np.any(_mag(k2) == 0) or np.any(_mag(k3) == 0):
        raise ValueError("singular kernel input: zero wavenumber")
    f1, f2, f3 = d123_forms(k1, k2, k3, g)
    scale = np.maximum(np.abs(f1), 1e-300)
    if np.any(np.abs(f1 - f2) > 1e-9 * scale) or np.any(np.abs(f1 - f3) > 1e-9 * scale):
        raise ValueError("d123 three-form disagreement (is the triple zero-sum?)")
    return f1


# ---------------------------------------------------------------------------
# Cubic kernels
# ---------------------------------------------------------------------------


def ell(k1, k2):
    """l_{k1}^{k2} = (|k1||k2| + k1.k2) / sqrt(|k1||k2|)."""
    m1, m2 = _mag(k1), _mag(k2)
    if np.any(m1 == 0) or np.any(m2 == 0):
        raise ResonantQuadError("resonant/degenerate quad: zero wavenumber in l")
    return (m1 * m2 + _dot(k1, k2)) / np.sqrt(m1 * m2)


def kernel_S(k1, k2, k3, g: float = 1.0):
    """S_123 = (k1.k3 + |k1||k3|) a1 a3 / a2 with a_k = (g/|k|)^(1/4)."""
    m1, m2, m3 = _mag(k1), _mag(k2), _mag(k3)
    if np.any(m1 == 0) or np.any(m2 == 0) or np.any(m3 == 0):
        raise ValueError("singular kernel input: zero wavenumber")
    a1 = (g / m1) ** 0.25
    a2 = (g / m2) ** 0.25
    a3 = (g / m3) ** 0.25
    return (_dot(k1, k3) + m1 * m3) * a1 * a3 / a2


def kernel_A(k1, k2, k3, g: float = 1.0):
    """A_123 = (S_123 + S_312 - S_231) / (8 pi sqrt(2))."""
    s = kernel_S(k1, k2, k3, g) + kernel_S(k3, k1, k2, g) - kernel_S(k2, k3, k1, g)
    return s / (8.0 * np.pi * np.sqrt(2.0))


def kernel_S_A_ell(k1, k2, k3, g: float = 1.0):
    """(S_123, A_123, pairwise l values) for one triple.

    The l tuple is (l_{k1}^{k2}, l_{k1}^{k3}, l_{k2}^{k3}).
    """
    return (
        kernel_S(k1, k2, k3, g),
        kernel_A(k1, k2, k3, g),
        (ell(k1, k2), ell(k1, k3), ell(k2, k3)),
    )


def kernels_PQR(ka, kb, kc, g: float = 1.0):
    """Gradient kernels of the auxiliary cubic flow.

    Slot convention: ``P`` reads its arguments as (k1, k2, k) and the pair
    ``Q``, ``R`` as (k, k2, k3); the shared denominator is symmetric under
    permutations so a single zero-sum triple serves all three.
    """
    ma, mb, mc = _mag(ka), _mag(kb), _mag(kc)
    if np.any(ma == 0) or np.any(mb == 0) or np.any(mc == 0):
        raise ValueError("singular kernel input: zero wavenumber")
    d = denom_d123(ka, kb, kc, g)
    ac = _dot(ka, kc) + ma * mc
    bc = _dot(kb, kc) + mb * mc
    p = -0.5 * mc + (g**2 / d) * ac * (ma - mb - 3.0 * mc)
    q = -(1.0 / (4.0 * g)) * (2.0 * ac + bc) - (g / (2.0 * d)) * (2.0 * ac**2 + bc**2)
    r = -mc + (g**2 / d) * (ac * (ma - mb - 3.0 * mc) + bc * (mb - ma - 3.0 * mc))
    return p, q, r


# ---------------------------------------------------------------------------
# Quartic coefficients
# ---------------------------------------------------------------------------


def coeff_T1(k1, k2, k3, k4):
    """Quartic coefficient of the z z zbar zbar monomials in the original
    fourth-order energy (gravity drops out)."""
    m1, m2, m3, m4 = _mag(k1), _mag(k2), _mag(k3), _mag(k4)
    k1, k2, k3, k4 = _vec(k1), _vec(k2), _vec(k3), _vec(k4)
    pref = (m1 * m2 * m3 * m4) ** 0.25 / (64.0 * np.pi**2)
    t_a = np.sqrt(m1 * m2) * (m1 + m2 - 2.0 * _mag(k2 - k3))
    t_b = np.sqrt(m3 * m4) * (m3 + m4 - 2.0 * _mag(k1 - k4))
    t_c = -2.0 * np.sqrt(m1 * m4) * (
        2.0 * m1
        + 2.0 * m4
        - _mag(k1 + k2)
        - _mag(k3 + k4)
        - _mag(k1 - k3)
        - _mag(k2 - k4)
    )
    return pref * (t_a + t_b + t_c)


@dataclass(frozen=True)
class CoeffReport:
    """A kernel value with its named sub-terms and the smallest resonance
    denominator encountered."""

    value: float
    parts: Mapping[str, float]
    condition: float

    def __post_init__(self):
        if self.parts:
            total = sum(self.parts.values())
            if abs(total - self.value) > 1e-13 * max(abs(self.value), 1.0):
                raise ValueError("CoeffReport parts do not sum to value")


def _ell_chain_sum(ka, kb):
    """l_{ka}^{kb} + l_{ka+kb}^{-ka} + l_{ka+kb}^{-kb} (the 'I' bracket)."""
    s = _vec(ka) + _vec(kb)
    return ell(ka, kb) + ell(s, -_vec(ka)) + ell(s, -_vec(kb))


def _ell_chain_diff(ka, kb):
    """l_{ka+kb}^{-ka} + l_{ka+kb}^{-kb} - l_{ka}^{kb} (the 'III' bracket)."""
    s = _vec(ka) + _vec(kb)
    return ell(s, -_vec(ka)) + ell(s, -_vec(kb)) - ell(ka, kb)


def coeff_T2(k1, k2, k3, k4, g: float = 1.0) -> CoeffReport:
    """The z z zbar zbar coefficient of the Poisson bracket correction,
    split into its printed parts I + II + III."""
    k1, k2, k3, k4 = _vec(k1), _vec(k2), _vec(k3), _vec(k4)
    m = [_mag(k) for k in (k1, k2, k3, k4)]
    if any(np.any(mm == 0) for mm in m):
        raise ResonantQuadError("resonant/degenerate quad: zero wavenumber")
    s12, s34 = k1 + k2, k3 + k4
    s13, s24 = k1 + k3, k2 + k4
    for s in (s12, s34, s13, s24):
        if np.any(_mag(s) == 0):
            raise ResonantQuadError("resonant/degenerate quad: vanishing pair sum")
    w = [_omega(k, g) for k in (k1, k2, k3, k4)]
    w12, w34 = _omega(s12, g), _omega(s34, g)
    w13, w24 = _omega(s13, g), _omega(s24, g)

    root4 = (m[0] * m[1] * m[2] * m[3]) ** 0.25
    pref_12 = np.sqrt(g) / (128.0 * np.pi**2) * root4 * (_mag(s12) * _mag(s34)) ** 0.25
    pref_13 = np.sqrt(g) / (32.0 * np.pi**2) * root4 * (_mag(s13) * _mag(s24)) ** 0.25

    d_i1, d_i2 = w[0] + w[1] + w12, w[2] + w[3] + w34
    part_i = (
        pref_12
        * _ell_chain_sum(k1, k2)
        * _ell_chain_sum(k3, k4)
        * (1.0 / d_i1 + 1.0 / d_i2)
    )

    d_ii1 = w[0] + w13 - w[2]
    d_ii2 = w[3] + w24 - w[1]
    br_ii1 = ell(k1, k3) + ell(s13, -k3) - ell(s13, -k1)
    br_ii2 = ell(k4, k2) + ell(s24, -k2) - ell(s24, -k4)
    part_ii = pref_13 * br_ii1 * br_ii2 * (1.0 / d_ii1 + 1.0 / d_ii2)

    d_iii1 = w[0] + w[1] - w12
    d_iii2 = w[2] + w[3] - w34
    part_iii = (
        -pref_12
        * _ell_chain_diff(k1, k2)
        * _ell_chain_diff(k3, k4)
        * (1.0 / d_iii1 + 1.0 / d_iii2)
    )

    condition = float(np.min(np.abs([d_i1, d_i2, d_ii1, d_ii2, d_iii1, d_iii2])))
    parts = {"I": float(part_i), "II": float(part_ii), "III": float(part_iii)}
    return CoeffReport(float(part_i + part_ii + part_iii), parts, condition)


def coeff_R123_Q123(kap1, kap2, kap3, g: float = 1.0):
    """Split-scaled correction kernels of the reconstruction flow.

    Inputs are the split-scaled wavenumbers (kx, ky/eps); each must have a
    nonzero x-component. These are computed for verification only and never
    applied to fields.
    """
    kap1, kap2, kap3 = _vec(kap1), _vec(kap2), _vec(kap3)
    x1, y1 = kap1[..., 0], kap1[..., 1]
    x2, y2 = kap2[..., 0], kap2[..., 1]
    x3, y3 = kap3[..., 0], kap3[..., 1]
    if np.any(x1 == 0) or np.any(x2 == 0) or np.any(x3 == 0):
        raise ValueError("singular kernel input: vanishing x-component")
    s1, s2, s3 = np.sign(x1), np.sign(x2), np.sign(x3)
    r = (
        y1**2 * np.abs(x2) / (4.0 * x1**2) * (s1 * s2 - s1 * s3)
        - y1**2 / (4.0 * np.abs(x1)) * (1.0 + s1 * s3)
        - y1 * y2 / (2.0 * np.abs(x1)) * (1.0 - s2 * s3)
    )
    q = -(1.0 / (8.0 * g)) * (
        y1**2 * np.abs(x3) / np.abs(x1)
        + y3**2 * np.abs(x1) / np.abs(x3)
        - 2.0 * y1 * y3 * s1 * s3
    )
    return r, q


# ---------------------------------------------------------------------------
# Modulational-regime evaluation and verifiers
# ---------------------------------------------------------------------------


def modulational_quad(k0: float, chis, eps: float):
    """Wavenumbers (+,+,-,-) of a near-carrier z z zbar zbar quad:
    k_{1,2} = +(k0 + eps chi), k_{3,4} = -(k0 + eps chi)."""
    chis = np.asarray(chis, dtype=float)
    base = np.array([k0, 0.0])
    ks = [base + eps * chis[j] for j in range(4)]
    return ks[0], ks[1], -ks[2], -ks[3]


def homogenized_coeff(k0: float, chis, eps: float, g: float = 1.0) -> float:
    """T1 - T2/2 on a near-carrier quad; tends to k0^3/(8 pi^2) as eps -> 0."""
    k1, k2, k3, k4 = modulational_quad(k0, chis, eps)
    t2 = coeff_T2(k1, k2, k3, k4, g)
    return float(coeff_T1(k1, k2, k3, k4) - 0.5 * t2.value)


def t2_parts_near_carrier(k0: float, chis, eps: float, g: float = 1.0) -> CoeffReport:
    """CoeffReport of T2 on the near-carrier quad (signed slots)."""
    k1, k2, k3, k4 = modulational_quad(k0, chis, eps)
    return coeff_T2(k1, k2, k3, k4, g)


def t1_expansion_residual(k0: float, chis, eps: float) -> float:
    """Pointwise residual of T1 against its first-order modulational expansion.

    The expansion applies to the kernel sampled at k_j = k0 + eps chi_j for
    all four slots; its first-order part carries both the smooth lambda terms
    and the |chi_i - chi_j| combination.
    """
    chis = np.asarray(chis, dtype=float)
    base = np.array([k0, 0.0])
    ks = [base + eps * chis[j] for j in range(4)]
    t1 = coeff_T1(*ks)
    lam = chis[:, 0]
    d13 = np.linalg.norm(chis[0] - chis[2])
    d24 = np.linalg.norm(chis[1] - chis[3])
    d23 = np.linalg.norm(chis[1] - chis[2])
    d14 = np.linalg.norm(chis[0] - chis[3])
    predicted = (
        k0**3 / (16.0 * np.pi**2)
        + eps * k0**2 / (64.0 * np.pi**2) * (lam[0] + lam[3] + 5.0 * (lam[1] + lam[2]))
        + eps * k0**2 / (32.0 * np.pi**2) * (d13 + d24 - d23 - d14)
    )
    return float(t1 - predicted)


@dataclass(frozen=True)
class SlopeReport:
    eps: tuple
    residuals: tuple  # max |residual| over the sampled quads, per eps
    slope: float


def _fit_slope(xs, ys) -> float:
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def random_zero_sum_chis(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    """n random chi-quads (shape (n, 4, 2)) with chi1 + chi2 - chi3 - chi4 = 0."""
    chis = rng.uniform(-scale, scale, size=(n, 4, 2))
    chis[:, 3] = chis[:, 0] + chis[:, 1] - chis[:, 2]
    return chis


def verify_T1_expansion(
    k0: float,
    eps_values=(0.02, 0.01, 0.005, 0.0025),
    n_quads: int = 100,
    seed: int = 0,
) -> SlopeReport:
    """Check that the T1 residual against its printed expansion is O(eps^2)."""
    rng = np.random.default_rng(seed)
    chis = random_zero_sum_chis(rng, n_quads)
    eps_values = tuple(float(e) for e in eps_values)
    residuals = []
    for eps in eps_values:
        r = max(abs(t1_expansion_residual(k0, chis[i], eps)) for i in range(n_quads))
        residuals.append(r)
    return SlopeReport(eps_values, tuple(residuals), _fit_slope(eps_values, residuals))
