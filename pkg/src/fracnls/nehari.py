"""Projection onto the Nehari manifold and ground-state search by retracted descent.

Along a ray ``t -> J(tu)`` the model energy is a three-term power law, so the
projection only needs the scalar coefficients of :class:`FiberingProfile`.
The descent step is a preconditioned gradient step followed by a full
re-projection; the line search is Armijo backtracking on the projected energy.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    Inconclusive,
    InvalidSpec,
    NoFeasibleStart,
    NoNehariIntersection,
    NotConverged,
    NotOnManifold,
)
from .functional import (
    EnergyReport,
    FiberingProfile,
    ProblemSpec,
    energy,
    energy_change,
    gradient,
)
from .grid import Field, TorusGrid, apply_multiplier, center_of_mass, translate

T_MAX = 1e8
T_MIN = 1e-8
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _profile_from(r: EnergyReport, spec: ProblemSpec) -> FiberingProfile:
    return FiberingProfile(r.norm_sq - r.hardy_term, r.F_integral * spec.p, r.K_integral * spec.q, spec.p, spec.q)


# --- projection -------------------------------------------------------------------------


@dataclass
class ProjectionResult:
    t_star: float
    projected: Field
    residual: float
    fibering_max: float
    bracket: tuple
    golden_iterations: int = 0
    norm_sq: float = math.nan


def _shifted_value(prof: FiberingProfile, t0: float, s: float) -> float:
    """``phi(t0 e^s) - phi(t0)`` without cancellation for small ``s``."""
    a, b, c, p, q = prof.a, prof.b, prof.c, prof.p, prof.q
    out = 0.5 * a * t0 * t0 * math.expm1(2.0 * s) - b * t0**p * math.expm1(p * s) / p
    if c:
        out += c * t0**q * math.expm1(q * s) / q
    return out


def _bracket(prof: FiberingProfile):
    """Doubling search for ``lo < t* < hi`` using the sign of ``phi'(t)/t``."""

    def slope(t):
        return prof.a - prof.b * t ** (prof.p - 2.0) + prof.c * t ** (prof.q - 2.0)

    if not prof.a > 0:
        raise NoNehariIntersection(f"quadratic part of the fibering map is not positive (a={prof.a:.3e})")
    t = 1.0
    if slope(t) > 0:
        while slope(2.0 * t) > 0:
            t *= 2.0
            if t > T_MAX:
                raise NoNehariIntersection(f"fibering map still increasing at t={t:.3e}")
        return t, 2.0 * t
    while slope(0.5 * t) <= 0:
        t *= 0.5
        if t < T_MIN:
            raise NoNehariIntersection(f"fibering map decreasing down to t={t:.3e}")
    return 0.5 * t, t


def golden_max(prof: FiberingProfile, lo: float, hi: float, rtol: float = 1e-13, max_iter: int = 500):
    """Golden-section search for the maximizer of ``phi`` on ``[lo, hi]``.

    Works in ``s = log t`` and compares values relative to the bracket midpoint,
    so the flat top of ``phi`` stays resolvable far below ``sqrt(eps)``.
    """
    x0, x1 = math.log(lo), math.log(hi)
    it = 0
    while x1 - x0 > rtol and it < max_iter:
        it += 1
        mid = 0.5 * (x0 + x1)
        t0 = math.exp(mid)
        d = _INVPHI * (x1 - x0)
        xa, xb = x1 - d, x0 + d
        if _shifted_value(prof, t0, xa - mid) >= _shifted_value(prof, t0, xb - mid):
            x1 = xb
        else:
            x0 = xa
    return math.exp(0.5 * (x0 + x1)), it


def scaled_report(r: EnergyReport, t: float, spec: ProblemSpec) -> EnergyReport:
    """Energy report of ``t u`` from the report of ``u`` (each term is homogeneous)."""
    t2, tp, tq = t * t, t**spec.p, t**spec.q
    kin, pot, hardy = r.kinetic * t2, r.potential * t2, r.hardy_term * t2
    F, K = r.F_integral * tp, r.K_integral * tq
    ns = kin + pot
    return EnergyReport(
        J=0.5 * ns - 0.5 * hardy - F + K,
        norm_sq=ns,
        hardy_term=hardy,
        F_integral=F,
        K_integral=K,
        nehari_residual=ns - hardy - spec.p * F + spec.q * K,
        kinetic=kin,
        potential=pot,
    )


def project(u: Field, spec: ProblemSpec, rtol: float = 1e-13, report: EnergyReport | None = None) -> ProjectionResult:
    """Nehari projection ``u -> t(u) u`` with ``t(u)`` the unique maximizer of ``J(tu)``."""
    if not np.any(u.values):
        raise NoNehariIntersection("the zero field has no Nehari projection")
    report = energy(u, spec) if report is None else report
    prof = _profile_from(report, spec)
    lo, hi = _bracket(prof)
    t, it = golden_max(prof, lo, hi, rtol)
    r = scaled_report(report, t, spec)
    return ProjectionResult(t, u * t, r.nehari_residual, r.J, (lo, hi), it, r.norm_sq)


# --- descent ------------------------------------------------------------------------------


@dataclass
class SolverOptions:
    tol_E: float = 1e-10
    tol_g: float = 1e-8
    max_iter: int = 50_000
    starts: int = 5
    seed: int = 0
    workers: int = 1
    armijo: float = 1e-4
    recenter: bool = True
    width_range: tuple = (0.5, 2.0)
    center_spread: float = 0.125  # seed centers drawn in +-spread*L

    def __post_init__(self):
        if not (self.tol_E > 0 and self.tol_g > 0):
            raise InvalidSpec("solver tolerances must be positive")
        if self.max_iter < 1 or self.starts < 1:
            raise InvalidSpec("max_iter and starts must be at least 1")


@dataclass
class StartResult:
    index: int
    field: Field | None
    J: float
    iterations: int
    grad_norm: float
    residual: float
    beta: float
    converged: bool
    history: list
    error: str | None = None


@dataclass
class GroundStateReport:
    minimizer: Field
    c_value: float
    iterations: int
    grad_norm_final: float
    nehari_residual_final: float
    beta_estimate: float
    multi_start_spread: float
    center_of_mass: list
    energy_history: list = field(default_factory=list)
    start_energies: list = field(default_factory=list)
    start_betas: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    converged: bool = True

    def to_dict(self) -> dict:
        return {
            "c_value": self.c_value,
            "iterations": self.iterations,
            "grad_norm_final": self.grad_norm_final,
            "nehari_residual_final": self.nehari_residual_final,
            "beta_estimate": self.beta_estimate,
            "multi_start_spread": self.multi_start_spread,
            "center_of_mass": [float(x) for x in self.center_of_mass],
            "start_energies": self.start_energies,
            "start_betas": self.start_betas,
            "failures": self.failures,
            "converged": self.converged,
        }


def preconditioner(spec: ProblemSpec) -> np.ndarray:
    """Half-lattice symbol of ``(1 + |k|^alpha)^{-1}``."""
    return 1.0 / (1.0 + spec.disc.symbol)


def _dual_inner(g1: np.ndarray, g2: np.ndarray, spec: ProblemSpec, P: np.ndarray) -> float:
    return float(np.vdot(g1, apply_multiplier(g2, spec.grid, P)) * spec.grid.cell_volume)


def gaussian_seeds(grid, n: int, rng: np.random.Generator, width_range=(0.5, 2.0), spread=0.125):
    """Gaussians with random centers and widths (amplitude is fixed by the projection).

    Centers are snapped to the nearest grid node.  The discrete energy is not
    exactly translation invariant below one cell: a bump between nodes sits
    near a saddle and creeps toward a node very slowly.
    """
    seeds = []
    for _ in range(n):
        c = rng.uniform(-spread, spread, grid.dim) * np.asarray(grid.length)
        c = [ax[np.argmin(np.abs(ax - ci))] for ax, ci in zip(grid.axes, c)]
        w = rng.uniform(*width_range)
        r2 = sum((x - ci) ** 2 for x, ci in zip(grid.coords, c))
        seeds.append(Field(grid, np.exp(-np.broadcast_to(r2, grid.shape) / (2.0 * w * w))))
    return seeds


def recenter(u: Field, step: int | None) -> Field:
    """Shift by whole periods so the center of mass is as close to the origin as possible."""
    if not step:
        return u
    com = center_of_mass(u)
    cells = [int(round(-c / (h * step))) * step for c, h in zip(com, u.grid.spacing)]
    return translate(u, cells)


def _descend(index: int, seed: Field, spec: ProblemSpec, opts: SolverOptions) -> StartResult:
    try:
        pr = project(seed, spec)
    except NoNehariIntersection as exc:
        return StartResult(index, None, math.nan, 0, math.nan, math.nan, math.nan, False, [], str(exc))
    P = preconditioner(spec)
    u, rep = pr.projected, energy(pr.projected, spec)
    J = rep.J
    beta = math.sqrt(rep.norm_sq)
    g = gradient(u, spec).values
    Pg = apply_multiplier(g, spec.grid, P)
    gn2 = float(np.vdot(g, Pg) * spec.grid.cell_volume)
    history = [J]
    step = 1.0
    prev = None
    converged = False
    dJ = math.inf
    it = 0
    while it < opts.max_iter:
        if math.sqrt(max(gn2, 0.0)) <= opts.tol_g and dJ <= opts.tol_E * (1.0 + abs(J)):
            converged = True
            break
        if prev is not None:
            du = u.values - prev[0]
            dg = g - prev[1]
            Pdg = Pg - prev[2]
            num = float(np.vdot(du, dg))
            den = float(np.vdot(dg, Pdg))
            if num > 0 and den > 0:
                step = min(max(num / den, 1e-4), 1e4)
        slope = -gn2
        s = step
        accepted = None
        for _ in range(60):
            trial = Field(spec.grid, u.values - s * Pg, check=False)
            try:
                tp = project(trial, spec)
            except NoNehariIntersection:
                s *= 0.5
                continue
            change = energy_change(u, tp.projected, spec)
            if change <= opts.armijo * s * slope:
                accepted = tp
                break
            s *= 0.5
        it += 1
        if accepted is None:
            # no decrease is resolvable any more: stationary up to rounding
            converged = math.sqrt(max(gn2, 0.0)) <= opts.tol_g
            break
        prev = (u.values, g, Pg)
        u = accepted.projected
        dJ = -change
        J += change
        history.append(J)
        g = gradient(u, spec).values
        Pg = apply_multiplier(g, spec.grid, P)
        gn2 = float(np.vdot(g, Pg) * spec.grid.cell_volume)
        beta = min(beta, math.sqrt(accepted.norm_sq))
    if opts.recenter:
        u = recenter(u, spec.translation_step())
    rep = energy(u, spec)
    return StartResult(
        index, u, rep.J, it, math.sqrt(max(gn2, 0.0)), rep.nehari_residual, beta, converged, history
    )


def minimize(spec: ProblemSpec, opts: SolverOptions | None = None, starts=None) -> GroundStateReport:
    """Multi-start Nehari descent; returns the lowest-energy result."""
    opts = opts or SolverOptions()
    if starts is None:
        rng = np.random.default_rng(opts.seed)
        starts = gaussian_seeds(spec.grid, opts.starts, rng, opts.width_range, opts.center_spread)
    starts = list(starts)
    if opts.workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=opts.workers) as pool:
            results = list(pool.map(lambda a: _descend(a[0], a[1], spec, opts), enumerate(starts)))
    else:
        results = [_descend(i, s, spec, opts) for i, s in enumerate(starts)]
    failures = [{"start": r.index, "error": r.error} for r in results if r.field is None]
    ok = [r for r in results if r.field is not None]
    if not ok:
        raise NoFeasibleStart("no start could be projected onto the Nehari manifold", failures)
    pool_ = [r for r in ok if r.converged] or ok
    best = min(pool_, key=lambda r: (r.J, r.index))
    energies = [r.J for r in pool_]
    report = GroundStateReport(
        minimizer=best.field,
        c_value=best.J,
        iterations=best.iterations,
        grad_norm_final=best.grad_norm,
        nehari_residual_final=best.residual,
        beta_estimate=min(r.beta for r in ok),
        multi_start_spread=max(energies) - min(energies),
        center_of_mass=list(center_of_mass(best.field)),
        energy_history=best.history,
        start_energies=[r.J for r in ok],
        start_betas=[r.beta for r in ok],
        failures=failures,
        converged=best.converged,
    )
    if not best.converged:
        raise NotConverged(
            f"no start met the stopping rule within {opts.max_iter} iterations "
            f"(best grad norm {best.grad_norm:.3e})",
            report,
        )
    return report


# --- Lipschitz bound of the inverse projection ---------------------------------------------


@dataclass
class LipschitzReport:
    lhs: list
    rhs: list
    violations: int

    @property
    def passed(self) -> bool:
        return self.violations == 0


def form_norm(u: Field, spec: ProblemSpec) -> float:
    """Norm of the energy space, including the Hardy shift when present."""
    r = energy(u, spec)
    return math.sqrt(max(r.norm_sq - r.hardy_term, 0.0))


def lipschitz_check(pairs, beta: float, spec: ProblemSpec, residual_tol: float = 1e-8) -> LipschitzReport:
    """Check ``|u/|u| - v/|v|| <= (2/beta)|u - v|`` for pairs on the Nehari manifold."""
    lhs, rhs, bad = [], [], 0
    for u, v in pairs:
        for w in (u, v):
            r = energy(w, spec)
            if not np.any(w.values) or abs(r.nehari_residual) > residual_tol * r.norm_sq:
                raise NotOnManifold(
                    f"field is off the Nehari manifold (residual {r.nehari_residual:.3e}, |u|^2 {r.norm_sq:.3e})"
                )
        nu, nv = form_norm(u, spec), form_norm(v, spec)
        if beta > min(nu, nv) * (1 + 1e-12):
            raise ValueError(f"beta={beta} exceeds the smallest norm in the pair ({min(nu, nv)})")
        left = form_norm(u * (1.0 / nu) - v * (1.0 / nv), spec)
        right = 2.0 / beta * form_norm(u - v, spec)
        lhs.append(left)
        rhs.append(right)
        if left > right * (1 + 1e-12) + 1e-15:
            bad += 1
    return LipschitzReport(lhs, rhs, bad)


# --- existence / nonexistence probe ---------------------------------------------------------


@dataclass
class DichotomyReport:
    sign: str
    c: float
    c_per: float
    margin: float
    verdict: str
    escape_shifts: list = field(default_factory=list)
    escape_energies: list = field(default_factory=list)
    escape_decreasing: bool | None = None
    full_center_of_mass: list = field(default_factory=list)
    converged: bool = True
    refined: dict | None = None
    timings: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = dict(self.__dict__)
        out["timings"] = dict(self.timings)
        return out


def _same_problem_data(a: ProblemSpec, b: ProblemSpec):
    if a.grid != b.grid or a.alpha != b.alpha:
        raise InvalidSpec("dichotomy specs must share grid and alpha")
    na, nb = a.nonlinearity, b.nonlinearity
    if na.p != nb.p or na.q != nb.q:
        raise InvalidSpec("dichotomy specs must share the nonlinearity")
    if not (np.array_equal(a.disc.gamma, b.disc.gamma) and np.array_equal(a.disc.K, b.disc.K)):
        raise InvalidSpec("dichotomy specs must share Gamma and K")
    if not np.array_equal(a.disc.V_per, b.disc.V_per):
        raise InvalidSpec("dichotomy specs must share V_per")


def _solve_lenient(spec, opts):
    try:
        return minimize(spec, opts), True
    except NotConverged as exc:
        return exc.report, False


def escape_curve(u_per: Field, spec: ProblemSpec, shifts):
    """``J(t_y tau_y u_per)`` for each integer cell shift ``y``."""
    return [project(translate(u_per, y), spec).fibering_max for y in shifts]


def _refine_margin(spec: ProblemSpec, spec_per: ProblemSpec, opts: SolverOptions, margin: float, order: float) -> dict:
    """Repeat both solves with twice the points per axis and extrapolate ``c_per - c``.

    Richardson extrapolation with convergence ``order`` in the spacing.  Low
    orders are the safe choice: minimizers with a sub-cell core (small alpha,
    p near the critical exponent) converge at roughly first order.
    """
    g = spec.grid
    fine = TorusGrid(g.dim, g.length, tuple(2 * m for m in g.points))
    for sp in (spec, spec_per):
        profiles = (sp.potential.v_per, sp.potential.v_loc, sp.nonlinearity.gamma, sp.nonlinearity.K)
        if any(isinstance(pr, np.ndarray) and pr.ndim for pr in profiles):
            raise InvalidSpec("grid refinement needs descriptor or scalar profiles, not sampled arrays")
    fs, fp = replace(spec, grid=fine), replace(spec_per, grid=fine)
    rep_per, ok_per = _solve_lenient(fp, opts)
    rep, ok = _solve_lenient(fs, opts)
    fine_margin = rep_per.c_value - rep.c_value
    return {
        "points": list(fine.points),
        "c": rep.c_value,
        "c_per": rep_per.c_value,
        "margin": fine_margin,
        "margin_extrapolated": fine_margin + (fine_margin - margin) / (2.0**order - 1.0),
        "order": order,
        "change": fine_margin - margin,
        "converged": ok and ok_per,
    }


def dichotomy_probe(
    spec: ProblemSpec,
    spec_per: ProblemSpec,
    opts: SolverOptions | None = None,
    *,
    escape_shifts=None,
    near_tol: float = 0.02,
    refine: bool = False,
    refine_order: float = 1.0,
) -> DichotomyReport:
    """Compare the full ground-state level ``c`` with the periodic level ``c_per``.

    ``V_loc < 0`` must give ``c < c_per`` by more than ``10 tol_E``.  For
    ``V_loc > 0`` the translates of the periodic minimizer, re-projected onto
    the full Nehari manifold, must lose energy as they move away.

    With ``refine`` both levels are recomputed on a grid with twice the points
    per axis.  A negative-sign verdict then also needs the refined and the
    extrapolated margins above ``10 tol_E``.
    """
    opts = opts or SolverOptions()
    _same_problem_data(spec, spec_per)
    if refine and not refine_order > 0:
        raise InvalidSpec(f"refine_order must be positive, got {refine_order}")
    if spec_per.mu != 0 or np.any(spec_per.disc.V_loc):
        raise InvalidSpec("the comparison problem must be periodic")
    sign = spec.potential.v_loc_sign(spec.grid)
    t0 = time.perf_counter()
    rep_per, ok_per = _solve_lenient(spec_per, opts)
    t1 = time.perf_counter()
    rep, ok = _solve_lenient(spec, opts)
    t2 = time.perf_counter()
    c, c_per = rep.c_value, rep_per.c_value
    margin = c_per - c
    out = DichotomyReport(
        sign=sign,
        c=c,
        c_per=c_per,
        margin=margin,
        verdict="",
        full_center_of_mass=[float(x) for x in rep.center_of_mass],
        converged=ok and ok_per,
        timings={"periodic_s": t1 - t0, "full_s": t2 - t1},
    )
    threshold = 10.0 * opts.tol_E
    if sign == "zero":
        out.verdict = "equal" if abs(margin) <= threshold * (1 + abs(c)) else "mismatch"
    elif sign == "negative":
        if margin <= threshold:
            out.verdict = "inconclusive"
            raise Inconclusive(f"c_per - c = {margin:.3e} is below 10 tol_E = {threshold:.1e}", out)
        out.verdict = "ground state below periodic level"
        if refine:
            out.refined = _refine_margin(spec, spec_per, opts, margin, refine_order)
            r = out.refined
            if min(r["margin"], r["margin_extrapolated"]) <= threshold:
                out.verdict = "inconclusive"
                raise Inconclusive(
                    f"margin not grid-converged: {margin:.6e} -> {r['margin']:.6e} at {r['points']} points", out
                )
            out.converged = out.converged and r["converged"]
    else:
        if escape_shifts is None:
            step = spec_per.translation_step() or 1
            quarter = int(spec.grid.points[0] // 4)
            escape_shifts = list(range(step, quarter + 1, step))
        vals = escape_curve(rep_per.minimizer, spec, escape_shifts)
        out.escape_shifts = [list(np.atleast_1d(y).tolist()) for y in escape_shifts]
        out.escape_energies = vals
        out.escape_decreasing = bool(all(b < a for a, b in zip(vals, vals[1:])))
        near = abs(c - c_per) <= near_tol * abs(c_per)
        out.verdict = "escape to infinity" if out.escape_decreasing and near else "inconclusive"
        if refine:
            out.refined = _refine_margin(spec, spec_per, opts, margin, refine_order)
            out.converged = out.converged and out.refined["converged"]
        if out.verdict == "inconclusive":
            raise Inconclusive("translation-escape diagnostic did not resolve", out)
    if not out.converged:
        raise Inconclusive("a solver run stopped at its iteration cap", out)
    return out
