"""Pseudo-spectral tools for 3D deep-water gravity waves.

Submodules
----------
spectral     grids, transforms, multipliers, dealiased products
dno          Dirichlet-Neumann operator series and its exact oracle
euler3d      full surface Euler solver (integrating-factor RK4)
envelope     Hamiltonian/classical Dysthe and NLS envelope solvers
normalform   third-order normal-form kernels and quartic coefficients
reconstruct  envelope <-> surface maps (Burgers flow, Stokes expansion)
stability    Benjamin-Feir instability analysis
harness      run configs, experiment orchestration, comparison metrics
"""

__version__ = "0.1.0"

from .spectral import (  # noqa: F401
    ComplexField,
    Grid2D,
    Multiplier,
    RealField,
    apply_multiplier,
    dealiased_product,
    dispersion_omega,
    symplectic_weight,
)
