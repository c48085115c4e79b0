"""Energy functional, its L2 gradient, the Nehari residual and the fibering map.

With ``A = (-Lap)^{alpha/2}`` the energy of a real field is

    J(u) = 1/2 <Au + Vu, u> - mu/2 int u^2/|x|^alpha
           - int Gamma|u|^p/p + 1/q int K|u|^q

and every integral is the ``h^N``-weighted node sum.  The quadratic part is
evaluated through the Fourier multiplier.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, fields, replace
from functools import cached_property

import numpy as np

from .errors import InvalidSpec, NumericalOverflow, UnsupportedClass
from .grid import Field, TorusGrid, apply_multiplier, check_same_grid
from .operators import (
    Lattice,
    NonlinearitySpec,
    PotentialSpec,
    fourier_symbol,
    hardy_weight,
)


@dataclass(frozen=True)
class Discretization:
    """Node samples of every coefficient of a problem."""

    V: np.ndarray
    V_per: np.ndarray
    V_loc: np.ndarray
    hardy: np.ndarray  # mu / |x|^alpha, zero outside the hardy class
    gamma: np.ndarray
    K: np.ndarray
    symbol: np.ndarray  # |k|^alpha on the half lattice


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """Grid, order ``alpha``, potential and nonlinearity of one stationary problem."""

    grid: TorusGrid
    alpha: float
    potential: PotentialSpec
    nonlinearity: NonlinearitySpec

    def __post_init__(self):
        a = float(self.alpha)
        if not (0.0 < a <= 2.0):
            raise InvalidSpec(f"alpha in (0, 2] violated: alpha={self.alpha}")
        if not self.grid.dim > a:
            raise InvalidSpec(f"N > alpha violated: N={self.grid.dim} alpha={a}")
        object.__setattr__(self, "alpha", a)
        self.potential.validate(self.grid, a)
        self.nonlinearity.validate(self.grid, a)

    @cached_property
    def disc(self) -> Discretization:
        g = self.grid
        V, vp, vl = self.potential.arrays(g)
        if self.potential.kind == "hardy" and self.potential.mu:
            hw = self.potential.mu * hardy_weight(g, self.alpha).values
        else:
            hw = np.zeros(g.shape)
        gam, K = self.nonlinearity.arrays(g)
        return Discretization(V, vp, vl, hw, gam, K, fourier_symbol(g, self.alpha))

    @property
    def mu(self) -> float:
        return float(self.potential.mu) if self.potential.kind == "hardy" else 0.0

    @property
    def p(self) -> float:
        return float(self.nonlinearity.p)

    @property
    def q(self) -> float:
        return float(self.nonlinearity.q)

    def with_potential(self, potential: PotentialSpec) -> "ProblemSpec":
        return replace(self, potential=potential)

    def periodic_part(self) -> "ProblemSpec":
        """Same problem with ``V_loc`` dropped and ``mu = 0`` (periodic class)."""
        pot = self.potential
        if pot.kind == "coercive":
            raise UnsupportedClass("a coercive problem has no periodic part")
        return self.with_potential(PotentialSpec(kind="periodic", v_per=pot.v_per))

    def translation_step(self) -> int | None:
        """Cells per period of the translation group, or ``None`` if the problem has none."""
        pot = self.potential
        if pot.kind == "coercive" or self.mu != 0 or np.any(self.disc.V_loc != 0):
            return None
        periods = []
        for prof in (pot.v_per, self.nonlinearity.gamma, self.nonlinearity.K):
            if isinstance(prof, Lattice):
                if prof.amplitude:
                    periods.append(prof.period)
            elif np.ndim(prof) != 0:
                return None
        if not periods:
            return 1
        steps = {self.grid.lattice_step(P) for P in periods}
        if None in steps or len(steps) != 1:
            return None
        return steps.pop()


# --- energy ----------------------------------------------------------------------------


@dataclass(frozen=True)
class EnergyReport:
    """Scalar pieces of ``J(u)``; ``J = norm_sq/2 - hardy_term/2 - F_integral + K_integral``."""

    J: float
    norm_sq: float
    hardy_term: float
    F_integral: float
    K_integral: float
    nehari_residual: float
    kinetic: float
    potential: float

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @staticmethod
    def csv_header() -> list:
        return [f.name for f in fields(EnergyReport)]

    def csv_row(self) -> list:
        return [repr(getattr(self, k)) for k in self.csv_header()]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.csv_header())
        w.writerow(self.csv_row())
        return buf.getvalue()


def _finite(name, value):
    value = float(value)
    if not math.isfinite(value):
        raise NumericalOverflow(name)
    return value


def _check_grid(u: Field, spec: ProblemSpec):
    if u.grid != spec.grid:
        from .errors import GridMismatch

        raise GridMismatch(f"field grid {u.grid} differs from problem grid {spec.grid}")


def apply_A(u: Field, spec: ProblemSpec) -> np.ndarray:
    return apply_multiplier(u.values, spec.grid, spec.disc.symbol)


def energy(u: Field, spec: ProblemSpec) -> EnergyReport:
    _check_grid(u, spec)
    d, dv = spec.disc, spec.grid.cell_volume
    v = u.values
    a = np.abs(v)
    with np.errstate(over="ignore", invalid="ignore"):
        kin = _finite("kinetic", dv * np.vdot(v, apply_A(u, spec)))
        pot = _finite("potential", dv * np.vdot(v, d.V * v))
        hardy = _finite("hardy_term", dv * np.vdot(v, d.hardy * v))
        pint = _finite("F_integral", dv * np.sum(d.gamma * a**spec.p))
        qint = _finite("K_integral", dv * np.sum(d.K * a**spec.q))
    norm_sq = kin + pot
    F = pint / spec.p
    Kt = qint / spec.q
    J = 0.5 * norm_sq - 0.5 * hardy - F + Kt
    res = norm_sq - hardy - pint + qint
    return EnergyReport(
        J=_finite("J", J),
        norm_sq=norm_sq,
        hardy_term=hardy,
        F_integral=F,
        K_integral=Kt,
        nehari_residual=_finite("nehari_residual", res),
        kinetic=kin,
        potential=pot,
    )


def gradient(u: Field, spec: ProblemSpec) -> Field:
    """L2 representative ``Au + Vu - mu u/|x|^alpha - Gamma|u|^{p-2}u + K|u|^{q-2}u``."""
    _check_grid(u, spec)
    d = spec.disc
    v = u.values
    a = np.abs(v)
    with np.errstate(over="ignore", invalid="ignore"):
        g = apply_A(u, spec) + (d.V - d.hardy) * v
        g -= d.gamma * a ** (spec.p - 2.0) * v
        g += d.K * a ** (spec.q - 2.0) * v
    if not np.all(np.isfinite(g)):
        raise NumericalOverflow("gradient")
    return Field(spec.grid, g, check=False)


def nehari_residual(u: Field, spec: ProblemSpec) -> float:
    """``J'(u)(u)``; it vanishes exactly on the Nehari manifold."""
    return energy(u, spec).nehari_residual


def hilbert_norm_sq(u: Field, spec: ProblemSpec) -> float:
    """Squared form norm ``||u||^2 = <Au, u> + int V u^2`` (no Hardy term)."""
    return energy(u, spec).norm_sq


def hardy_norm_sq(u: Field, spec: ProblemSpec) -> float:
    """``||u||_mu^2 = ||u||^2 - mu int u^2/|x|^alpha``."""
    r = energy(u, spec)
    return r.norm_sq - r.hardy_term


def scalar_product(u: Field, v: Field, spec: ProblemSpec) -> float:
    """Form inner product ``<Au, v> + int V u v``."""
    check_same_grid(u, v)
    _check_grid(u, spec)
    dv = spec.grid.cell_volume
    return float(dv * (np.vdot(apply_A(u, spec), v.values) + np.vdot(spec.disc.V * u.values, v.values)))


# --- fibering map ------------------------------------------------------------------------


@dataclass(frozen=True)
class FiberingProfile:
    """``phi(t) = J(tu) = a t^2/2 - b t^p/p + c t^q/q`` for the model nonlinearity.

    ``a = ||u||^2 - mu int u^2/|x|^alpha``, ``b = int Gamma|u|^p``, ``c = int K|u|^q``.
    """

    a: float
    b: float
    c: float
    p: float
    q: float

    def value(self, t: float) -> float:
        return 0.5 * self.a * t * t - self.b * t**self.p / self.p + self.c * t**self.q / self.q

    def derivative(self, t: float) -> float:
        return self.a * t - self.b * t ** (self.p - 1.0) + self.c * t ** (self.q - 1.0)

    def closed_form_max(self) -> float | None:
        """Maximizer for the pure power case ``c = 0``."""
        if self.c != 0 or self.a <= 0 or self.b <= 0:
            return None
        return (self.a / self.b) ** (1.0 / (self.p - 2.0))


def fibering_profile(u: Field, spec: ProblemSpec) -> FiberingProfile:
    r = energy(u, spec)
    return FiberingProfile(
        a=r.norm_sq - r.hardy_term,
        b=r.F_integral * spec.p,
        c=r.K_integral * spec.q,
        p=spec.p,
        q=spec.q,
    )


def fibering_value(u: Field, t: float, spec: ProblemSpec) -> float:
    """``J(t u)`` for ``t >= 0``."""
    if not t >= 0:
        raise ValueError(f"fibering parameter must be non-negative, got {t}")
    return energy(u * float(t), spec).J


# --- split functionals -------------------------------------------------------------------


@dataclass(frozen=True)
class SplitEnergies:
    """``J``, the periodic functional and the limit functional at one field.

    ``J_inf = J - 1/2 int V_loc u^2`` keeps the Hardy term; ``J_per`` drops
    both ``V_loc`` and the Hardy term and is therefore translation invariant.
    Without a Hardy term the two coincide.
    """

    J: float
    J_per: float
    J_inf: float
    v_loc_term: float  # 1/2 int V_loc u^2
    hardy_half: float  # mu/2 int u^2/|x|^alpha

    def __iter__(self):
        return iter((self.J, self.J_per, self.J_inf))


def split_energies(u: Field, spec: ProblemSpec) -> SplitEnergies:
    if spec.potential.kind not in ("close_to_periodic", "hardy"):
        raise UnsupportedClass(
            f"split energies need class close_to_periodic or hardy, got {spec.potential.kind}"
        )
    r = energy(u, spec)
    dv = spec.grid.cell_volume
    vloc = 0.5 * float(dv * np.vdot(u.values, spec.disc.V_loc * u.values))
    hh = 0.5 * r.hardy_term
    return SplitEnergies(J=r.J, J_per=r.J - vloc + hh, J_inf=r.J - vloc, v_loc_term=vloc, hardy_half=hh)


def _power_difference(new_abs: np.ndarray, old_abs: np.ndarray, r: float) -> np.ndarray:
    """``|new|^r - |old|^r`` nodewise, accurate when the two are close."""
    out = new_abs**r - old_abs**r
    close = (old_abs > 0) & (np.abs(new_abs - old_abs) < 0.5 * old_abs)
    ratio = (new_abs[close] - old_abs[close]) / old_abs[close]
    out[close] = old_abs[close] ** r * np.expm1(r * np.log1p(ratio))
    return out


def energy_change(u: Field, v: Field, spec: ProblemSpec) -> float:
    """``J(v) - J(u)`` evaluated without subtracting two large energies.

    The quadratic part uses ``<B(u+v), v-u>/2`` and the power terms use
    ``expm1``/``log1p``, so the result keeps its relative accuracy even when
    the change is far below the rounding level of ``J`` itself.
    """
    _check_grid(u, spec)
    _check_grid(v, spec)
    d, dv = spec.disc, spec.grid.cell_volume
    s = u.values + v.values
    diff = v.values - u.values
    quad = np.vdot(apply_multiplier(s, spec.grid, d.symbol) + (d.V - d.hardy) * s, diff)
    au, av = np.abs(u.values), np.abs(v.values)
    dF = np.sum(d.gamma * _power_difference(av, au, spec.p)) / spec.p
    dK = np.sum(d.K * _power_difference(av, au, spec.q)) / spec.q if np.any(d.K) else 0.0
    return _finite("energy_change", dv * (0.5 * quad - dF + dK))
