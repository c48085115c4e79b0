"""Periodic box discretization, discrete Fourier transform and grid norms.

Nodes sit at ``(m + 1/2) h - L/2`` for ``m = 0 .. M-1`` so that the origin
is never a node.  The discrete transform is normalized to approximate the
continuous transform ``\\hat u(k) = \\int e^{-i k x} u(x) dx``; with this
choice Parseval reads ``h^N sum |u|^2 = L^{-N} sum |\\hat u|^2``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np
import scipy.fft as sfft

from .errors import GridMismatch, InvalidExponent

THREADS_ENV = "FRACNLS_THREADS"


def fft_workers() -> int:
    """Thread count for transforms, overridable through ``FRACNLS_THREADS``."""
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _per_axis(value, dim, cast):
    if np.ndim(value) == 0:
        return (cast(value),) * dim
    out = tuple(cast(v) for v in value)
    if len(out) != dim:
        raise ValueError(f"expected {dim} entries, got {len(out)}")
    return out


@dataclass(frozen=True)
class TorusGrid:
    """Uniform periodic grid on ``[-L/2, L/2)^N`` with half-cell offset nodes.

    Parameters
    ----------
    dim : int
        Spatial dimension N.
    length : float or sequence of float
        Box length per axis.
    points : int or sequence of int
        Even number of nodes per axis, at least 8.
    """

    dim: int
    length: tuple
    points: tuple

    def __post_init__(self):
        dim = int(self.dim)
        if dim < 1:
            raise ValueError(f"dimension must be positive, got {self.dim}")
        length = _per_axis(self.length, dim, float)
        points = _per_axis(self.points, dim, int)
        for L in length:
            if not (L > 0 and math.isfinite(L)):
                raise ValueError(f"box length must be positive and finite, got {L}")
        for M in points:
            if M < 8 or M % 2:
                raise ValueError(f"points per axis must be even and >= 8, got {M}")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "length", length)
        object.__setattr__(self, "points", points)

    @property
    def shape(self) -> tuple:
        return self.points

    @property
    def size(self) -> int:
        return int(np.prod(self.points))

    @property
    def spacing(self) -> tuple:
        return tuple(L / M for L, M in zip(self.length, self.points))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def volume(self) -> float:
        return float(np.prod(self.length))

    @cached_property
    def axes(self) -> tuple:
        return tuple(
            (np.arange(M) + 0.5) * h - 0.5 * L
            for L, M, h in zip(self.length, self.points, self.spacing)
        )

    @cached_property
    def coords(self) -> tuple:
        """Sparse (broadcastable) coordinate arrays, ``indexing='ij'``."""
        return tuple(np.meshgrid(*self.axes, indexing="ij", sparse=True))

    @cached_property
    def radius(self) -> np.ndarray:
        r2 = np.zeros(self.shape)
        for x in self.coords:
            r2 = r2 + x * x
        return np.sqrt(r2)

    @cached_property
    def wavenumbers(self) -> tuple:
        """Per-axis angular frequencies ``2 pi m / L`` in FFT order."""
        return tuple(
            2.0 * np.pi * np.fft.fftfreq(M, d=h) for M, h in zip(self.points, self.spacing)
        )

    @cached_property
    def k_abs(self) -> np.ndarray:
        """``|k|`` on the full (complex) frequency lattice."""
        ks = np.meshgrid(*self.wavenumbers, indexing="ij", sparse=True)
        return np.sqrt(sum(k * k for k in ks))

    @cached_property
    def k_sq_half(self) -> np.ndarray:
        """``|k|^2`` on the half lattice used by real transforms."""
        ks = list(self.wavenumbers[:-1])
        M, h = self.points[-1], self.spacing[-1]
        ks.append(2.0 * np.pi * np.fft.rfftfreq(M, d=h))
        grids = np.meshgrid(*ks, indexing="ij", sparse=True)
        return sum(k * k for k in grids)

    @cached_property
    def k_abs_half(self) -> np.ndarray:
        return np.sqrt(self.k_sq_half)

    @cached_property
    def _origin_phase(self) -> np.ndarray:
        ks = np.meshgrid(*self.wavenumbers, indexing="ij", sparse=True)
        arg = sum(k * ax[0] for k, ax in zip(ks, self.axes))
        return np.exp(-1j * arg)

    def lattice_step(self, period: float) -> int | None:
        """Number of cells spanned by ``period`` if it is commensurate on every axis."""
        steps = []
        for h in self.spacing:
            n = period / h
            if abs(n - round(n)) > 1e-9 * max(1.0, abs(n)) or round(n) < 1:
                return None
            steps.append(int(round(n)))
        if len(set(steps)) != 1:
            return None
        return steps[0]


class Field:
    """Real grid function bound to a :class:`TorusGrid`."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: TorusGrid, values, *, check: bool = True):
        arr = np.asarray(values, dtype=float)
        if arr.shape != grid.shape:
            arr = np.broadcast_to(arr, grid.shape).copy()
        if check and not np.all(np.isfinite(arr)):
            raise ValueError("field values must be finite")
        self.grid = grid
        self.values = arr

    @classmethod
    def zeros(cls, grid: TorusGrid) -> "Field":
        return cls(grid, np.zeros(grid.shape), check=False)

    @classmethod
    def from_function(cls, grid: TorusGrid, fn) -> "Field":
        return cls(grid, fn(*grid.coords))

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy(), check=False)

    def _other(self, other):
        if isinstance(other, Field):
            check_same_grid(self, other)
            return other.values
        return other

    def __add__(self, other):
        return Field(self.grid, self.values + self._other(other), check=False)

    __radd__ = __add__

    def __sub__(self, other):
        return Field(self.grid, self.values - self._other(other), check=False)

    def __rsub__(self, other):
        return Field(self.grid, self._other(other) - self.values, check=False)

    def __mul__(self, other):
        return Field(self.grid, self.values * self._other(other), check=False)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return Field(self.grid, self.values / self._other(other), check=False)

    def __neg__(self):
        return Field(self.grid, -self.values, check=False)

    def __repr__(self):
        return f"Field(grid={self.grid!r}, max|u|={np.max(np.abs(self.values)):.3e})"


def check_same_grid(*fields: Field) -> TorusGrid:
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise GridMismatch(f"fields live on different grids: {grid} vs {f.grid}")
    return grid


def forward_transform(u: Field) -> np.ndarray:
    """Spectral coefficients of ``u`` on the frequency lattice (FFT order)."""
    g = u.grid
    return g.cell_volume * g._origin_phase * sfft.fftn(u.values, workers=fft_workers())


def inverse_transform(coeffs: np.ndarray, grid: TorusGrid) -> Field:
    coeffs = np.asarray(coeffs)
    if coeffs.shape != grid.shape:
        raise GridMismatch(f"coefficient shape {coeffs.shape} does not match grid {grid.shape}")
    vals = sfft.ifftn(coeffs / grid._origin_phase, workers=fft_workers()).real
    return Field(grid, vals / grid.cell_volume)


def spectral_sum(coeffs: np.ndarray, grid: TorusGrid) -> float:
    """``L^{-N} sum |c_k|^2``; equals the squared L2 norm by Parseval."""
    return float(np.sum(np.abs(coeffs) ** 2) / grid.volume)


def apply_multiplier(values: np.ndarray, grid: TorusGrid, symbol_half: np.ndarray) -> np.ndarray:
    """Apply a real even Fourier symbol (given on the half lattice) to real values."""
    w = fft_workers()
    spec = sfft.rfftn(values, workers=w)
    return sfft.irfftn(spec * symbol_half, s=grid.shape, workers=w)


def l2_inner(u: Field, v: Field) -> float:
    grid = check_same_grid(u, v)
    return float(np.vdot(u.values, v.values).real * grid.cell_volume)


def lp_norm(u: Field, r: float) -> float:
    """Discrete ``L^r`` norm ``(sum |u|^r h^N)^{1/r}``; ``r = inf`` gives the max."""
    if not r >= 1:
        raise InvalidExponent(f"L^r norm needs r >= 1, got {r}")
    a = np.abs(u.values)
    if math.isinf(r):
        return float(a.max())
    if r == 2:
        return math.sqrt(float(np.vdot(a, a)) * u.grid.cell_volume)
    return float(np.sum(a**r) * u.grid.cell_volume) ** (1.0 / r)


def translate(u: Field, cells: Sequence[int] | int) -> Field:
    """``tau_k u = u(. - k h)`` for an integer cell vector ``k``."""
    cells = _per_axis(cells, u.grid.dim, _as_int)
    return Field(u.grid, np.roll(u.values, cells, axis=tuple(range(u.grid.dim))), check=False)


def _as_int(v):
    if isinstance(v, (int, np.integer)):
        return int(v)
    fv = float(v)
    if fv != round(fv):
        from .errors import InvalidShift

        raise InvalidShift(f"shift must be a whole number of cells, got {v}")
    return int(round(fv))


def center_of_mass(u: Field) -> np.ndarray:
    """Circular center of mass of ``u^2`` on the torus, in length units."""
    g = u.grid
    w = u.values**2
    total = w.sum()
    out = np.zeros(g.dim)
    if total == 0:
        return out
    for ax in range(g.dim):
        theta = 2.0 * np.pi * (np.arange(g.points[ax]) + 0.5) / g.points[ax]
        shape = [1] * g.dim
        shape[ax] = -1
        theta = theta.reshape(shape)
        z = np.sum(w * np.exp(1j * theta)) / total
        ang = np.angle(z) % (2.0 * np.pi)
        out[ax] = ang / (2.0 * np.pi) * g.length[ax] - 0.5 * g.length[ax]
    return out
