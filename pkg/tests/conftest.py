import numpy as np
import pytest

from deepwater.spectral import Grid2D, RealField


@pytest.fixture
def grid():
    return Grid2D(64, 32)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def band_limited_field(grid: Grid2D, rng, scale=1.0, kmax=5) -> RealField:
    """Random real field supported on |j|, |l| <= kmax, sup-norm ``scale``."""
    spec = np.zeros((grid.nx, grid.ny), dtype=complex)
    for j in range(-kmax, kmax + 1):
        for l in range(-kmax, kmax + 1):
            if j == 0 and l == 0:
                continue
            c = rng.standard_normal() + 1j * rng.standard_normal()
            spec[j, l] = c
            spec[-j, -l] = np.conj(c)
    f = np.fft.ifft2(spec).real * (grid.nx * grid.ny)
    return RealField(grid, scale * f / np.max(np.abs(f)))
