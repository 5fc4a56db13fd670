"""Binary field snapshots and CSV exports.

Snapshot layout (little endian): magic ``DWF1``, then Nx, Ny as int64,
Lx, Ly as float64, a one-byte field kind tag (0 real, 1 complex), then
row-major samples: one float64 per point for real fields, two (re, im) for
complex fields.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .spectral import ComplexField, Grid2D, RealField

MAGIC = b"DWF1"
_HEADER = struct.Struct("<4sqqddB")


def write_field(path, field: RealField | ComplexField) -> None:
    grid = field.grid
    kind = 1 if isinstance(field, ComplexField) else 0
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, grid.nx, grid.ny, grid.lx, grid.ly, kind))
        if kind:
            inter = np.empty((grid.nx, grid.ny, 2))
            inter[..., 0] = field.samples.real
            inter[..., 1] = field.samples.imag
            fh.write(np.ascontiguousarray(inter, dtype="<f8").tobytes())
        else:
            fh.write(np.ascontiguousarray(field.samples, dtype="<f8").tobytes())


def read_field(path) -> RealField | ComplexField:
    with open(path, "rb") as fh:
        magic, nx, ny, lx, ly, kind = _HEADER.unpack(fh.read(_HEADER.size))
        if magic != MAGIC:
            raise ValueError(f"{path}: not a field snapshot (bad magic {magic!r})")
        grid = Grid2D(int(nx), int(ny), float(lx), float(ly))
        count = nx * ny * (2 if kind else 1)
        data = np.frombuffer(fh.read(count * 8), dtype="<f8")
        if data.size != count:
            raise ValueError(f"{path}: truncated snapshot")
    if kind:
        data = data.reshape(nx, ny, 2)
        return ComplexField(grid, data[..., 0] + 1j * data[..., 1])
    return RealField(grid, data.reshape(nx, ny).copy())


def format_sig(x: float) -> str:
    """17 significant digits, enough to round-trip a float64."""
    return f"{x:.17g}"


def write_cross_section_csv(path, field: RealField, y_index: int | None = None) -> None:
    """1-D cross-section along x at a fixed y row, as "x,value"."""
    grid = field.grid
    if y_index is None:
        y_index = grid.ny // 2
    with open(path, "w") as fh:
        fh.write("x,value\n")
        for i, xv in enumerate(grid.x):
            fh.write(f"{format_sig(float(xv))},{format_sig(float(field.samples[i, y_index]))}\n")


def write_csv(path, header: str, rows) -> None:
    """Write rows of floats under a fixed header, 17 significant digits."""
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(format_sig(float(v)) for v in row) + "\n")


def write_pgm(path, values: np.ndarray) -> None:
    """Plain (P2) PGM heatmap of a nonnegative array, max-normalized."""
    v = np.asarray(values, dtype=float)
    vmax = float(v.max())
    pix = np.zeros_like(v, dtype=int) if vmax <= 0 else np.rint(255.0 * v / vmax).astype(int)
    with open(path, "w") as fh:
        fh.write(f"P2\n{v.shape[1]} {v.shape[0]}\n255\n")
        for row in pix:
            fh.write(" ".join(str(int(p)) for p in row) + "\n")


def ensure_dir(path) -> Path:
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p
