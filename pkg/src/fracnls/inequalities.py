"""Validators for the fractional Hardy, Gagliardo-Nirenberg and epsilon bounds."""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .constants import (  # noqa: F401  (re-exported)
    HardyConstants,
    H_N_alpha,
    c_N_alpha,
    critical_exponent,
    gamma_fn,
    mu_star,
    norm_equivalence_D,
    pv_constant,
)
from .errors import InvalidExponent, NotLocalized
from .grid import Field, apply_multiplier, l2_inner, lp_norm, translate
from .operators import (
    Lattice,
    NonlinearitySpec,
    _pv_weights,
    fourier_symbol,
    hardy_weight,
    profile_values,
    tail_mass,
)

HARDY_TAIL_LIMIT = 1e-6
HARDY_SLACK_REL = 1e-10


# --- Hardy inequality ---------------------------------------------------------------


@dataclass(frozen=True)
class HardyReport:
    """Both sides of the fractional Hardy inequality for one field.

    ``lhs`` is the Gagliardo double integral (the spectral form divided by
    ``c_{N,alpha}``; for ``alpha = 2`` it is the Dirichlet integral),
    ``rhs`` is ``int u^2/|x|^alpha`` and ``slack = lhs - H * rhs``.
    """

    lhs: float
    rhs: float
    constant: float
    slack: float
    passed: bool

    def to_dict(self):
        return asdict(self)


def _kinetic(u: Field, alpha: float) -> float:
    Au = apply_multiplier(u.values, u.grid, fourier_symbol(u.grid, alpha))
    return float(np.vdot(u.values, Au) * u.grid.cell_volume)


def hardy_check(u: Field, constants: HardyConstants) -> HardyReport:
    g = u.grid
    if g.dim != constants.N:
        raise ValueError(f"field dimension {g.dim} differs from constants N={constants.N}")
    tm = tail_mass(u)
    if tm > HARDY_TAIL_LIMIT:
        raise NotLocalized(f"tail mass {tm:.3e} exceeds {HARDY_TAIL_LIMIT:.0e}")
    alpha = constants.alpha
    kin = _kinetic(u, alpha)
    if alpha == 2.0:
        lhs, H = kin, constants.mu_star
    else:
        lhs, H = kin / constants.c_N_alpha, constants.H_N_alpha
    rhs = l2_inner(u, u * hardy_weight(g, alpha))
    slack = lhs - H * rhs
    return HardyReport(lhs, rhs, H, slack, bool(slack >= -HARDY_SLACK_REL * abs(lhs)))


def write_hardy_csv(path, reports: Sequence[HardyReport], labels: Sequence[str] | None = None):
    labels = labels or [str(i) for i in range(len(reports))]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["field", "lhs", "rhs", "constant", "slack", "pass"])
        for lab, r in zip(labels, reports):
            w.writerow([lab, repr(r.lhs), repr(r.rhs), repr(r.constant), repr(r.slack), int(r.passed)])


# --- Gagliardo double integral (small-grid oracle) --------------------------------------


def _spectral_derivatives(u: Field, orders):
    g = u.grid
    k = 2.0 * np.pi * np.fft.rfftfreq(g.points[0], d=g.spacing[0])
    spec = np.fft.rfft(u.values)
    out = []
    for n in orders:
        mult = (1j * k) ** n
        if n % 2:
            mult[-1] = 0.0  # odd derivative of the Nyquist mode
        out.append(np.fft.irfft(spec * mult, n=g.points[0]))
    return out


def gagliardo_seminorm(u: Field, alpha: float, eps_cells: int = 2) -> float:
    """``int_T int_R |u(x) - u(x+z)|^2 / |z|^{1+alpha} dz dx`` for a 1-D periodic field.

    Direct O(M^2) quadrature with the periodic kernel images folded in and
    an even Taylor fit inside ``|z| < eps``.  Used to cross-check the
    normalization ``<(-Lap)^{alpha/2} u, u> = c_{1,alpha} * seminorm``.
    """
    g = u.grid
    if g.dim != 1:
        raise NotImplementedError("the double-integral oracle is implemented for N = 1")
    if not 0.0 < alpha < 2.0:
        raise ValueError(f"need 0 < alpha < 2, got {alpha}")
    M, h = g.points[0], g.spacing[0]
    inner = max(2, 2 * int(math.ceil(eps_cells / 2)))
    w = _pv_weights(M, float(h), float(alpha), inner)
    v = u.values
    acc = np.zeros_like(v)
    for d in range(1, M // 2 + 1):
        acc += w[d] * ((np.roll(v, -d) - v) ** 2 + (np.roll(v, d) - v) ** 2)
    d1, d2, d3 = _spectral_derivatives(u, (1, 2, 3))
    eps = inner * h
    e2 = 2.0 * d1**2
    e4 = 2.0 * (0.25 * d2**2 + d1 * d3 / 3.0)
    acc += e2 * eps ** (2.0 - alpha) / (2.0 - alpha) + e4 * eps ** (4.0 - alpha) / (4.0 - alpha)
    return float(np.sum(acc) * h)


# --- Gagliardo-Nirenberg -----------------------------------------------------------------


@dataclass(frozen=True)
class GNReport:
    """``|u|_{r+1}^{r+1} / (||u||_{H^{alpha/2}}^a |u|_2^b)`` with the interpolation exponents."""

    ratio: float
    lhs: float
    a: float
    b: float
    sobolev_norm: float
    l2_norm: float


def gn_exponents(r: float, N: int, alpha: float):
    a = (r - 1.0) * N / alpha
    return a, r + 1.0 - a


def gn_check(u: Field, r: float, alpha: float) -> GNReport:
    N = u.grid.dim
    if not r > 1:
        raise InvalidExponent(f"need r > 1, got r={r}")
    crit = critical_exponent(N, alpha)
    if r + 1.0 > crit:
        raise InvalidExponent(f"r + 1 <= 2*_alpha violated: r+1={r + 1.0:g} 2*_alpha={crit:g}")
    a, b = gn_exponents(r, N, alpha)
    lhs = lp_norm(u, r + 1.0) ** (r + 1.0)
    hs = math.sqrt(max(_kinetic(u, alpha) + l2_inner(u, u), 0.0))
    l2 = lp_norm(u, 2.0)
    if lhs == 0.0:
        return GNReport(0.0, 0.0, a, b, hs, l2)
    return GNReport(lhs / (hs**a * l2**b), lhs, a, b, hs, l2)


def gn_empirical_constant(fields: Sequence[Field], r: float, alpha: float) -> float:
    """Largest ratio over a corpus; an empirical lower estimate of the best constant."""
    return max(gn_check(u, r, alpha).ratio for u in fields)


# --- epsilon bound -------------------------------------------------------------------------


@dataclass(frozen=True)
class EpsilonBound:
    eps: float
    C: float
    p: float
    scan_points: int


def default_scan(n: int = 4001, lo: float = -12.0, hi: float = 12.0) -> np.ndarray:
    s = np.logspace(lo, hi, n)
    return np.concatenate([-s[::-1], s])


def _gamma_max(nl: NonlinearitySpec, grid=None) -> float:
    gam = nl.gamma
    if isinstance(gam, Field):
        return float(np.max(gam.values))
    if isinstance(gam, Lattice) or np.ndim(gam) != 0:
        if grid is None:
            raise ValueError("a grid is needed to sample a non-constant Gamma")
        return float(np.max(profile_values(gam, grid)))
    return float(gam)


def epsilon_bound_check(
    nl: NonlinearitySpec | Callable[[np.ndarray], np.ndarray],
    eps: float,
    *,
    p: float | None = None,
    scan: np.ndarray | None = None,
    grid=None,
) -> EpsilonBound:
    """Smallest ``C`` with ``|f(u)| <= eps|u| + C|u|^{p-1}`` on a sampled ``u``-scan.

    ``nl`` is either a model nonlinearity (sampled at its largest ``Gamma``)
    or a scalar callable, in which case ``p`` must be given.
    """
    if not eps > 0:
        raise ValueError(f"need eps > 0, got {eps}")
    if isinstance(nl, NonlinearitySpec):
        gmax = _gamma_max(nl, grid)
        p = nl.p

        def f(s):
            return gmax * np.abs(s) ** (p - 2.0) * s

    else:
        if p is None:
            raise ValueError("an explicit exponent p is needed for a callable nonlinearity")
        f = nl
    s = default_scan() if scan is None else np.asarray(scan, dtype=float)
    s = np.sort(s[s != 0])

    def excess(x):
        a = np.abs(x)
        return (np.abs(f(x)) - eps * a) / a ** (p - 1.0)

    ex = excess(s)
    C = float(max(np.max(ex), 0.0))
    # the supremum usually sits between scan points: polish the best one on each side
    for side in (s < 0, s > 0):
        idx = np.flatnonzero(side)
        if idx.size < 3:
            continue
        i = idx[int(np.argmax(ex[idx]))]
        lo, hi = max(i - 1, idx[0]), min(i + 1, idx[-1])
        sign = np.sign(s[i])
        la, lb = sorted((math.log(abs(s[lo])), math.log(abs(s[hi]))))
        res = minimize_scalar(
            lambda t: -float(excess(np.array([sign * math.exp(t)]))[0]),
            bounds=(la, lb),
            method="bounded",
            options={"xatol": 1e-12},
        )
        C = max(C, -float(res.fun))
    if not math.isfinite(C):
        raise ValueError("epsilon bound is not finite on the scan")
    return EpsilonBound(float(eps), C, float(p), int(s.size))


# --- Hardy term under translation ---------------------------------------------------------


@dataclass(frozen=True)
class DecayCurve:
    shifts: list
    distances: np.ndarray
    values: np.ndarray


def hardy_translation_decay(u: Field, shifts: Sequence, alpha: float) -> DecayCurve:
    """``int |u(. - x_n)|^2 / |x|^alpha`` for each integer cell shift ``x_n``."""
    g = u.grid
    w = hardy_weight(g, alpha)
    vals, dist = [], []
    for k in shifts:
        uk = translate(u, k)
        vals.append(l2_inner(uk, uk * w))
        kk = np.broadcast_to(np.asarray(k, dtype=float), (g.dim,))
        dist.append(float(np.linalg.norm(kk * np.asarray(g.spacing))))
    return DecayCurve(list(shifts), np.array(dist), np.array(vals))
