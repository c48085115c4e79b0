"""Translation identities, energy splitting of synthesized sequences and standing waves."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.fft as sfft

from .errors import InvalidShift, InvalidSpec, UnstableStep
from .functional import ProblemSpec, energy, split_energies
from .grid import Field, TorusGrid, _per_axis, _as_int, fft_workers, l2_inner, translate
from .nehari import form_norm, project

TRANSLATION_RTOL = 1e-12


# --- translation suite ------------------------------------------------------------------


@dataclass
class TranslationReport:
    shift: tuple
    adjoint_error: float
    isometry_error: float
    energy_error: float
    nehari_t_error: float
    equivariance_error: float
    tol: float = TRANSLATION_RTOL

    @property
    def checks(self) -> dict:
        return {
            "adjoint": self.adjoint_error <= self.tol,
            "isometry": self.isometry_error <= self.tol,
            "energy_invariance": self.energy_error <= self.tol,
            "nehari_invariance": self.nehari_t_error <= self.tol and self.equivariance_error <= self.tol,
        }

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def _form_inner(u: Field, v: Field, spec: ProblemSpec) -> float:
    """Inner product of the energy space (Hardy shift included)."""
    from .functional import apply_A

    d = spec.disc
    return float(np.vdot(apply_A(u, spec) + (d.V - d.hardy) * u.values, v.values) * spec.grid.cell_volume)


def _checked_shift(spec: ProblemSpec, k) -> tuple:
    cells = _per_axis(k, spec.grid.dim, _as_int)
    step = spec.translation_step()
    if step is None:
        raise InvalidSpec("translation identities need a periodic problem (V_loc = 0, mu = 0)")
    if any(c % step for c in cells):
        raise InvalidShift(f"shift {cells} is not a multiple of the period ({step} cells)")
    return cells


def translation_suite(u: Field, v: Field, k, spec: ProblemSpec) -> TranslationReport:
    """Adjointness, isometry, and invariance of ``J`` and of the Nehari projection under ``tau_k``."""
    cells = _checked_shift(spec, k)
    neg = tuple(-c for c in cells)
    tu, tv_neg = translate(u, cells), translate(v, neg)
    scale = form_norm(u, spec) * form_norm(v, spec) or 1.0
    adj = abs(_form_inner(tu, v, spec) - _form_inner(u, tv_neg, spec)) / scale
    nu = form_norm(u, spec)
    iso = abs(form_norm(tu, spec) - nu) / (nu or 1.0)
    J0, J1 = energy(u, spec).J, energy(tu, spec).J
    ej = abs(J1 - J0) / (1.0 + abs(J0))
    if np.any(u.values):
        p0, p1 = project(u, spec), project(tu, spec)
        terr = abs(p1.t_star - p0.t_star) / p0.t_star
        ref = translate(p0.projected, cells).values
        eq = float(np.max(np.abs(p1.projected.values - ref)) / (np.max(np.abs(ref)) or 1.0))
    else:
        terr = eq = 0.0
    return TranslationReport(cells, adj, iso, ej, terr, eq)


# --- profile decomposition ----------------------------------------------------------------


@dataclass
class ProfileBundle:
    """``u_n = u0 + sum_k w^k(. - y_n^k)`` with integer-cell shift sequences.

    ``shifts[k][n]`` is the cell vector of profile ``k`` at sequence index ``n``.
    """

    u0: Field
    profiles: list
    shifts: list

    def __post_init__(self):
        if len(self.profiles) != len(self.shifts):
            raise ValueError("one shift sequence is needed per profile")
        g = self.u0.grid
        self.shifts = [[_per_axis(y, g.dim, _as_int) for y in seq] for seq in self.shifts]
        lengths = {len(seq) for seq in self.shifts}
        if len(lengths) > 1:
            raise ValueError("all shift sequences must have the same length")

    @property
    def ell(self) -> int:
        return len(self.profiles)

    @property
    def length(self) -> int:
        return len(self.shifts[0]) if self.shifts else 0

    def member(self, n: int) -> Field:
        u = self.u0.copy()
        for w, seq in zip(self.profiles, self.shifts):
            u = u + translate(w, seq[n])
        return u

    def min_separation(self, n: int) -> float:
        """Smallest torus distance among the shifts at index ``n`` (origin of ``u0`` included)."""
        g = self.u0.grid
        pts = [tuple(0 for _ in range(g.dim))] + [seq[n] for seq in self.shifts]
        best = math.inf
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                d2 = 0.0
                for a, b, M, h in zip(pts[i], pts[j], g.points, g.spacing):
                    c = (a - b) % M
                    d2 += (min(c, M - c) * h) ** 2
                best = min(best, math.sqrt(d2))
        return best


@dataclass
class DecompositionReport:
    n: int
    separation: float
    J_un: float
    J_u0: float
    profile_terms: list  # J_per(w^k), Hardy correction included
    hardy_corrections: list
    deviation: float
    deviation_without_correction: float
    scale: float

    @property
    def relative_deviation(self) -> float:
        return self.deviation / self.scale if self.scale else 0.0


def _profile_energy(w: Field, spec: ProblemSpec):
    """``(J_inf(w), mu/2 int w^2/|x|^alpha)`` for a profile sitting at the origin."""
    if spec.potential.kind in ("close_to_periodic", "hardy"):
        s = split_energies(w, spec)
        return s.J_inf, s.hardy_half
    if spec.potential.kind == "periodic":
        return energy(w, spec).J, 0.0
    raise InvalidSpec("energy splitting is not defined for the coercive class")


def decomposition_energy_check(bundle: ProfileBundle, n: int, spec: ProblemSpec) -> DecompositionReport:
    """``|J(u_n) - J(u0) - sum_k [J_inf(w^k) + mu/2 int |w^k|^2/|x|^alpha]|``."""
    g = spec.grid
    for seq in bundle.shifts:
        for c, M in zip(seq[n], g.points):
            if abs(c) > M // 2:
                raise InvalidShift(f"shift {seq[n]} exceeds the torus half-width ({M // 2} cells)")
    J_un = energy(bundle.member(n), spec).J
    J_u0 = energy(bundle.u0, spec).J
    jinf, corr = [], []
    for w in bundle.profiles:
        a, b = _profile_energy(w, spec)
        jinf.append(a)
        corr.append(b)
    with_corr = J_u0 + sum(jinf) + sum(corr)
    without = J_u0 + sum(jinf)
    terms = [a + b for a, b in zip(jinf, corr)]
    scale = abs(J_u0) + sum(abs(t) for t in terms)
    sep = bundle.min_separation(n) if bundle.ell else math.inf
    return DecompositionReport(
        n, sep, J_un, J_u0, terms, corr, abs(J_un - with_corr), abs(J_un - without), scale
    )


# --- standing waves -------------------------------------------------------------------------


@dataclass
class WaveState:
    grid: TorusGrid
    psi: np.ndarray
    t: float
    omega: float

    @property
    def mass(self) -> float:
        return float(np.sum(np.abs(self.psi) ** 2) * self.grid.cell_volume)


@dataclass
class Trajectory:
    times: list
    snapshots: list
    final: WaveState
    mass_drift: float
    max_modulus_deviation: float | None = None
    steps: int = 0
    dt: float = 0.0
    meta: dict = field(default_factory=dict)


def max_stable_dt(spec: ProblemSpec, amplitude: float) -> float:
    """Largest step for which every split phase advances by at most ``pi`` per step."""
    d = spec.disc
    kmax = float(np.max(spec.grid.k_abs_half)) ** spec.alpha
    pot = float(np.max(np.abs(d.V - d.hardy)))
    nl = float(np.max(d.gamma)) * amplitude ** (spec.p - 2.0) + float(np.max(d.K)) * amplitude ** (spec.q - 2.0)
    return math.pi / (kmax + pot + nl)


def _phase(spec: ProblemSpec, omega: float, nonlinear: bool):
    d = spec.disc
    lin = d.V - d.hardy + omega

    def field_(psi):
        if not nonlinear:
            return lin
        a = np.abs(psi)
        return lin - d.gamma * a ** (spec.p - 2.0) + d.K * a ** (spec.q - 2.0)

    return field_


def evolve(
    initial,
    omega: float,
    spec: ProblemSpec,
    T: float,
    dt: float,
    *,
    store_every: int = 10,
    nonlinear: bool = True,
    reference: Field | None = None,
    mass_tol: float = 1e-6,
) -> Trajectory:
    """Strang split-step integration of ``i Psi_t = A Psi + (V + omega) Psi - h(|Psi|) Psi``.

    ``h(|Psi|) Psi = Gamma|Psi|^{p-2}Psi - K|Psi|^{q-2}Psi``; the Hardy term, when
    present, is part of the potential.  ``nonlinear=False`` drops ``h``.
    With ``reference`` given, the largest ``|| |Psi(t)| - reference ||_2 / ||reference||_2``
    over all steps is recorded.
    """
    g = spec.grid
    psi = np.array(initial.values if isinstance(initial, Field) else initial, dtype=complex)
    if psi.shape != g.shape:
        raise InvalidSpec(f"initial state shape {psi.shape} does not match grid {g.shape}")
    if not np.all(np.isfinite(psi)):
        raise InvalidSpec("initial state must be finite")
    if not (T >= 0 and dt > 0):
        raise ValueError("need T >= 0 and dt > 0")
    amp = float(np.max(np.abs(psi))) if psi.size else 0.0
    bound = max_stable_dt(spec, amp if nonlinear else 0.0)
    if dt > bound:
        raise UnstableStep(f"dt={dt:g} exceeds the split-step bound {bound:.3e}", 0.5 * bound)
    nsteps = int(round(T / dt))
    if abs(nsteps * dt - T) > 1e-9 * max(T, 1.0):
        raise ValueError(f"T={T} is not a whole number of steps of dt={dt}")
    w = fft_workers()
    kin = np.exp(-1j * dt * g.k_abs ** spec.alpha) if spec.alpha != 2.0 else None
    if kin is None:
        ks = np.meshgrid(*g.wavenumbers, indexing="ij", sparse=True)
        kin = np.exp(-1j * dt * sum(k * k for k in ks))
    phase = _phase(spec, omega, nonlinear)
    dv = g.cell_volume
    m0 = float(np.sum(np.abs(psi) ** 2) * dv)
    ref = None
    if reference is not None:
        ref = reference.values
        ref_norm = math.sqrt(float(np.sum(ref**2) * dv)) or 1.0
    dev = 0.0

    def deviation(ps):
        return math.sqrt(float(np.sum((np.abs(ps) - ref) ** 2) * dv)) / ref_norm

    if ref is not None:
        dev = deviation(psi)
    times, snaps = [0.0], [psi.copy()]
    for n in range(1, nsteps + 1):
        psi = psi * np.exp(-0.5j * dt * phase(psi))
        psi = sfft.ifftn(kin * sfft.fftn(psi, workers=w), workers=w)
        psi = psi * np.exp(-0.5j * dt * phase(psi))
        if ref is not None:
            dev = max(dev, deviation(psi))
        if n % store_every == 0 or n == nsteps:
            times.append(n * dt)
            snaps.append(psi.copy())
            m = float(np.sum(np.abs(psi) ** 2) * dv)
            drift = abs(m - m0) / m0 if m0 else m
            if drift > mass_tol or not np.all(np.isfinite(psi)):
                raise UnstableStep(f"mass drift {drift:.3e} at t={n * dt:g}", 0.5 * dt)
    m = float(np.sum(np.abs(psi) ** 2) * dv)
    drift = abs(m - m0) / m0 if m0 else m
    return Trajectory(
        times,
        snaps,
        WaveState(g, psi, nsteps * dt, omega),
        drift,
        dev if ref is not None else None,
        nsteps,
        dt,
        {"omega": omega, "nonlinear": nonlinear, "store_every": store_every},
    )


@dataclass
class StandingWaveReport:
    omega: float
    dt: float
    deviation: float
    deviation_half_dt: float
    mass_drift: float
    passed: bool


def standing_wave_check(
    u: Field, spec: ProblemSpec, omega: float = 0.0, T: float = 1.0, dt: float = 1e-3, tol: float = 1e-3
) -> StandingWaveReport:
    """Evolve ``e^{-i omega t} u`` at ``dt`` and ``dt/2`` and compare ``|Psi(t)|`` with ``u``."""
    a = evolve(u, omega, spec, T, dt, reference=u, store_every=max(1, int(round(T / dt))))
    b = evolve(u, omega, spec, T, 0.5 * dt, reference=u, store_every=max(1, int(round(2 * T / dt))))
    ok = a.max_modulus_deviation <= tol and b.max_modulus_deviation <= tol
    return StandingWaveReport(omega, dt, a.max_modulus_deviation, b.max_modulus_deviation, a.mass_drift, ok)


def plane_wave(grid: TorusGrid, modes: Sequence[int]) -> np.ndarray:
    """``exp(i k.x)`` for integer mode numbers (one per axis)."""
    arg = sum(2.0 * np.pi * m / L * x for m, L, x in zip(modes, grid.length, grid.coords))
    return np.exp(1j * np.broadcast_to(arg, grid.shape))


def l2_distance(u: Field, v: Field) -> float:
    d = u - v
    return math.sqrt(max(l2_inner(d, d), 0.0))
