"""Fractional Laplacian, potentials, the Hardy weight and the model nonlinearity."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np
from scipy.special import zeta

from .constants import critical_exponent, mu_star, pv_constant
from .errors import InvalidOrder, InvalidSpec, NotLocalized
from .grid import Field, TorusGrid, apply_multiplier

POTENTIAL_CLASSES = ("periodic", "close_to_periodic", "coercive", "hardy")


# --- closed-form profile descriptors -------------------------------------------------


@dataclass(frozen=True)
class Lattice:
    """Periodic profile ``mean + amplitude * sum_i cos(2 pi x_i / period)``."""

    mean: float
    amplitude: float = 0.0
    period: float = 1.0

    def on(self, grid: TorusGrid) -> np.ndarray:
        out = np.full(grid.shape, float(self.mean))
        if self.amplitude:
            for x in grid.coords:
                out = out + self.amplitude * np.cos(2.0 * np.pi * x / self.period)
        return out


@dataclass(frozen=True)
class Bump:
    """Localized profile ``amplitude * exp(-|x - center|^2 / width^2)``."""

    amplitude: float
    width: float = 1.0
    center: tuple = ()

    def on(self, grid: TorusGrid) -> np.ndarray:
        c = self.center or (0.0,) * grid.dim
        r2 = sum((x - ci) ** 2 for x, ci in zip(grid.coords, c))
        return self.amplitude * np.exp(-np.broadcast_to(r2, grid.shape) / self.width**2)


@dataclass(frozen=True)
class PowerWell:
    """Coercive profile ``v0 + coefficient * |x|^exponent`` (minimal-image ``|x|``)."""

    v0: float
    coefficient: float = 1.0
    exponent: float = 2.0

    def on(self, grid: TorusGrid) -> np.ndarray:
        return self.v0 + self.coefficient * grid.radius**self.exponent


Profile = Union[float, Field, Lattice, Bump, PowerWell, np.ndarray]


def profile_values(desc: Profile, grid: TorusGrid) -> np.ndarray:
    if isinstance(desc, (Lattice, Bump, PowerWell)):
        return desc.on(grid)
    if isinstance(desc, Field):
        if desc.grid != grid:
            raise InvalidSpec("profile field lives on a different grid")
        return desc.values
    arr = np.asarray(desc, dtype=float)
    return np.broadcast_to(arr, grid.shape)


def _is_zero(desc) -> bool:
    if desc is None:
        return True
    if isinstance(desc, (int, float)):
        return desc == 0
    if isinstance(desc, Bump):
        return desc.amplitude == 0
    return False


# --- potential and nonlinearity specs ------------------------------------------------


@dataclass(frozen=True, eq=False)
class PotentialSpec:
    """External potential ``V = V_per + V_loc`` (or a coercive well), plus Hardy coupling.

    The Hardy term ``-mu / |x|^alpha`` is kept separate from ``V``.
    """

    kind: str = "periodic"
    v_per: Profile = 1.0
    v_loc: Profile = 0.0
    coercive: PowerWell | None = None
    mu: float = 0.0

    def arrays(self, grid: TorusGrid):
        """Return ``(V, V_per, V_loc)`` sampled on ``grid``."""
        if self.kind == "coercive":
            well = profile_values(self.coercive, grid)
            zero = np.zeros(grid.shape)
            return np.array(well, dtype=float), np.array(well, dtype=float), zero
        vp = np.array(profile_values(self.v_per, grid), dtype=float)
        vl = np.array(profile_values(self.v_loc, grid), dtype=float)
        return vp + vl, vp, vl

    def v_loc_sign(self, grid: TorusGrid) -> str:
        vl = self.arrays(grid)[2]
        if np.all(vl == 0):
            return "zero"
        if np.all(vl <= 0):
            return "negative"
        if np.all(vl >= 0):
            return "positive"
        return "mixed"

    def validate(self, grid: TorusGrid, alpha: float) -> None:
        if self.kind not in POTENTIAL_CLASSES:
            raise InvalidSpec(f"unknown potential class '{self.kind}', expected one of {POTENTIAL_CLASSES}")
        if self.kind != "hardy" and self.mu != 0:
            raise InvalidSpec(f"mu must be 0 outside the hardy class, got mu={self.mu}")
        if self.kind == "periodic" and not _is_zero(self.v_loc):
            raise InvalidSpec("periodic class requires V_loc == 0")
        if self.kind == "hardy":
            ms = mu_star(grid.dim, alpha)
            if not (0.0 <= self.mu < ms):
                raise InvalidSpec(f"0 <= mu < mu* violated: mu={self.mu}, mu*={ms}")
        if self.kind == "coercive":
            if not isinstance(self.coercive, PowerWell):
                raise InvalidSpec("coercive class needs a growth descriptor")
            if not (self.coercive.v0 > 0 and self.coercive.coefficient > 0 and self.coercive.exponent > 0):
                raise InvalidSpec(
                    "coercive growth needs V0 > 0, coefficient > 0, exponent > 0, got "
                    f"{self.coercive}"
                )
        V, vp, vl = self.arrays(grid)
        sign = self.v_loc_sign(grid)
        if sign == "positive":
            # nonexistence regime: positivity is required of the periodic part only
            if vp.min() <= 0:
                raise InvalidSpec(f"ess inf V_per > 0 violated: min V_per = {vp.min():.6g}")
        elif V.min() <= 0:
            raise InvalidSpec(f"ess inf V > 0 violated: min V = {V.min():.6g}")
        if sign == "mixed":
            raise InvalidSpec("V_loc must be sign-definite (zero, negative or positive)")


@dataclass(frozen=True, eq=False)
class NonlinearitySpec:
    """Model nonlinearity ``f(x,u) = Gamma(x)|u|^{p-2}u`` with defocusing ``K(x)|u|^{q-2}u``."""

    p: float
    q: float
    gamma: Profile = 1.0
    K: Profile = 0.0

    def arrays(self, grid: TorusGrid):
        g = np.array(profile_values(self.gamma, grid), dtype=float)
        k = np.array(profile_values(self.K, grid), dtype=float)
        return g, k

    def validate(self, grid: TorusGrid, alpha: float) -> None:
        crit = critical_exponent(grid.dim, alpha)
        if not self.q > 2:
            raise InvalidSpec(f"2 < q violated: q={self.q} (need 2 < q < p < 2*_alpha)")
        if not self.q < self.p:
            raise InvalidSpec(f"q < p violated: q={self.q} p={self.p}")
        if not self.p < crit:
            raise InvalidSpec(
                f"p < 2*_alpha violated: p={self.p} 2*_alpha={crit:g} (need 2 < q < p < 2*_alpha)"
            )
        g, k = self.arrays(grid)
        if g.min() <= 0:
            raise InvalidSpec(f"Gamma > 0 violated: min Gamma = {g.min():.6g}")
        if k.min() < 0:
            raise InvalidSpec(f"K >= 0 violated: min K = {k.min():.6g}")


# --- fractional Laplacian --------------------------------------------------------------


def _check_order(alpha, upper_closed=True):
    ok = 0.0 < alpha <= 2.0 if upper_closed else 0.0 < alpha < 2.0
    if not ok:
        rng = "(0, 2]" if upper_closed else "(0, 2)"
        raise InvalidOrder(f"alpha must lie in {rng}, got {alpha}")


def fourier_symbol(grid: TorusGrid, alpha: float) -> np.ndarray:
    """``|k|^alpha`` on the half lattice of the real transform."""
    _check_order(alpha)
    if alpha == 2.0:
        return grid.k_sq_half
    return grid.k_abs_half**alpha


def frac_laplacian_fourier(u: Field, alpha: float) -> Field:
    """Spectral fractional Laplacian: multiply coefficients by ``|k|^alpha``."""
    symbol = fourier_symbol(u.grid, alpha)
    return Field(u.grid, apply_multiplier(u.values, u.grid, symbol), check=False)


@lru_cache(maxsize=32)
def _pv_weights(M: int, h: float, alpha: float, inner_cells: int):
    """Offset weights of the periodized kernel for offsets 0..M/2 (cells)."""
    L = M * h
    half = M // 2
    w = np.zeros(half + 1)
    gx, gw = np.polynomial.legendre.leggauss(12)
    d = inner_cells
    while d < half:
        n = 2 if d + 2 <= half else 1
        a, b = d * h, (d + n) * h
        z = a + 0.5 * (b - a) * (gx + 1.0)
        wq = 0.5 * (b - a) * gw * z ** (-1.0 - alpha)
        nodes = [(d + i) * h for i in range(n + 1)]
        for i in range(n + 1):
            basis = np.ones_like(z)
            for m in range(n + 1):
                if m != i:
                    basis *= (z - nodes[m]) / (nodes[i] - nodes[m])
            w[d + i] += np.sum(wq * basis)
        d += n
    # periodic images |z + nL|, n != 0, folded onto [0, L/2]; trapezoid rule
    zz = np.arange(half + 1) * h
    images = L ** (-1.0 - alpha) * (zeta(1.0 + alpha, 1.0 + zz / L) + zeta(1.0 + alpha, 1.0 - zz / L))
    trap = np.full(half + 1, h)
    trap[0] = trap[-1] = 0.5 * h
    w += trap * images
    return w


def tail_mass(u: Field, fraction: float = 0.375) -> float:
    """Share of ``|u|_2^2`` carried by nodes with ``max_i |x_i| >= fraction * L``."""
    g = u.grid
    mask = np.zeros(g.shape, dtype=bool)
    for x, L in zip(g.coords, g.length):
        mask = mask | (np.abs(np.broadcast_to(x, g.shape)) >= fraction * L)
    total = float(np.sum(u.values**2))
    if total == 0:
        return 0.0
    return float(np.sum(u.values[mask] ** 2)) / total


def frac_laplacian_pv(u: Field, alpha: float, eps: float | None = None, *, max_tail: float = 1e-8) -> Field:
    """Principal-value (singular integral) fractional Laplacian on a 1-D torus.

    Works on the symmetrized difference ``2u(x) - u(x+z) - u(x-z)``.  Inside the
    exclusion radius the difference is replaced by its even Taylor expansion
    (second and fourth finite differences); outside it is integrated against
    ``|z|^{-1-alpha}`` with quadratic product integration on two-cell panels.
    Periodic images of the kernel are summed with the Hurwitz zeta function, so
    the result approximates the same periodic operator as the Fourier form.

    Intended as an independent cross-check of :func:`frac_laplacian_fourier`.
    """
    if alpha == 2.0:
        raise InvalidOrder("the principal-value form is undefined for alpha = 2")
    _check_order(alpha, upper_closed=False)
    g = u.grid
    if g.dim != 1:
        raise NotImplementedError("the principal-value quadrature is implemented for N = 1")
    M, h = g.points[0], g.spacing[0]
    eps = 2.0 * h if eps is None else float(eps)
    if eps < h * (1 - 1e-12):
        raise ValueError(f"exclusion radius must be at least one cell (h={h}), got {eps}")
    if not np.any(u.values):
        return Field.zeros(g)
    tm = tail_mass(u)
    if tm > max_tail:
        raise NotLocalized(f"tail mass {tm:.3e} exceeds {max_tail:.1e}")
    inner = max(2, 2 * int(math.ceil(eps / (2.0 * h) - 1e-12)))
    if inner > M // 2:
        raise ValueError("exclusion radius exceeds half the box")
    eps_eff = inner * h
    w = _pv_weights(M, float(h), float(alpha), inner)

    v = u.values
    out = np.zeros_like(v)
    for d in range(inner, M // 2 + 1):
        out += w[d] * (2.0 * v - np.roll(v, d) - np.roll(v, -d))
    r1p, r1m = np.roll(v, -1), np.roll(v, 1)
    r2p, r2m = np.roll(v, -2), np.roll(v, 2)
    d2 = (-r2m + 16.0 * r1m - 30.0 * v + 16.0 * r1p - r2p) / (12.0 * h * h)
    d4 = (r2m - 4.0 * r1m + 6.0 * v - 4.0 * r1p + r2p) / h**4
    out -= d2 * eps_eff ** (2.0 - alpha) / (2.0 - alpha)
    out -= d4 / 12.0 * eps_eff ** (4.0 - alpha) / (4.0 - alpha)
    return Field(g, pv_constant(1, alpha) * out, check=False)


# --- potentials -------------------------------------------------------------------------


def hardy_weight(grid: TorusGrid, alpha: float) -> Field:
    """Nodewise ``1 / |x|^alpha`` with ``x`` the minimal-image position."""
    return Field(grid, grid.radius ** (-float(alpha)), check=False)


# --- nonlinearity -------------------------------------------------------------------------


def _gamma_values(nl: NonlinearitySpec, grid: TorusGrid):
    return nl.arrays(grid)[0]


def apply_f(u: Field, nl: NonlinearitySpec) -> Field:
    """``Gamma(x)|u|^{p-2}u`` nodewise."""
    gam = _gamma_values(nl, u.grid)
    a = np.abs(u.values)
    return Field(u.grid, gam * a ** (nl.p - 2.0) * u.values, check=False)


def primitive_F(u: Field, nl: NonlinearitySpec) -> Field:
    """``Gamma(x)|u|^p / p`` nodewise."""
    gam = _gamma_values(nl, u.grid)
    return Field(u.grid, gam * np.abs(u.values) ** nl.p / nl.p, check=False)


def defocusing_term(u: Field, nl: NonlinearitySpec) -> Field:
    """``K(x)|u|^{q-2}u`` nodewise."""
    k = nl.arrays(u.grid)[1]
    return Field(u.grid, k * np.abs(u.values) ** (nl.q - 2.0) * u.values, check=False)
