"""Command-line runner: ``fracnls solve|validate|dichotomy|evolve|decompose|sweep --config FILE``.

Configuration is YAML.  Every defaulted value is filled in at load time and
echoed into ``manifest.json`` so a run can be reproduced from its manifest.
Numeric reports never contain timings; those live in the manifest only.
"""

from __future__ import annotations

import argparse
import copy
import csv
import json
import math
import platform
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import scipy
import yaml

from . import __version__
from .analysis import ProfileBundle, decomposition_energy_check, evolve
from .constants import HardyConstants, mu_star
from .errors import ConfigError, FracNLSError, Inconclusive, InvalidSpec, NotConverged
from .functional import EnergyReport, ProblemSpec, energy
from .grid import Field, TorusGrid, THREADS_ENV
from .inequalities import (
    epsilon_bound_check,
    gn_check,
    hardy_check,
    write_hardy_csv,
)
from .nehari import SolverOptions, dichotomy_probe, minimize
from .ngsf import write_complex_sequence, write_field
from .operators import Bump, Lattice, NonlinearitySpec, PotentialSpec, PowerWell

SCHEMA_VERSION = 1
TASKS = ("solve", "validate", "dichotomy", "evolve", "decompose", "sweep")

DEFAULTS = {
    "schema_version": SCHEMA_VERSION,
    "task": None,
    "problem": {
        "N": 1,
        "alpha": 0.5,
        "L": 32.0,
        "M": 256,
        "potential": {"class": "periodic", "V_per": 1.0, "V_loc": 0.0, "coercive": None, "mu": 0.0},
        "nonlinearity": {"p": 3.5, "q": 2.5, "gamma": 1.0, "K": 0.0},
    },
    "solver": {
        "tol_E": 1e-10,
        "tol_g": 1e-8,
        "max_iter": 50000,
        "starts": 5,
        "seed": 0,
        "workers": 1,
    },
    "validate": {"fields": 100, "alphas": None, "gn_r": None, "eps": [0.01, 0.1, 1.0]},
    "dichotomy": {"escape_max": None, "near_tol": 0.02, "refine": True, "refine_order": 1.0},
    "evolve": {"T": 1.0, "dt": 1e-3, "omega": 0.0, "store_every": 10},
    "decompose": {"separations": None, "u0_width": 1.0, "profile_width": 1.2, "profile_amplitude": 0.8},
    "sweep": {"parameter": "problem.potential.mu", "values": []},
    "output": {"dir": "out", "formats": ["json", "csv", "ngsf"]},
}

EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2


# --- configuration ----------------------------------------------------------------------


@dataclass
class RunConfig:
    task: str
    problem: ProblemSpec
    solver: SolverOptions
    options: dict
    output_dir: Path
    formats: list
    effective: dict = field(default_factory=dict)
    source: str | None = None

    @property
    def seed(self) -> int:
        return self.solver.seed


def _merge(base: dict, over: dict, where: str) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if k not in base:
            raise ConfigError(f"unknown key '{where}{k}'")
        if isinstance(base[k], dict) and isinstance(v, dict):
            out[k] = _merge(base[k], v, f"{where}{k}.")
        else:
            out[k] = v
    return out


def _num(v, name, kind=float):
    if isinstance(v, bool):
        raise ConfigError(f"'{name}' must be a number, got {v!r}")
    try:
        x = kind(float(v)) if kind is int else kind(v)
    except (TypeError, ValueError):
        raise ConfigError(f"'{name}' must be a number, got {v!r}") from None
    if kind is int and float(v) != x:
        raise ConfigError(f"'{name}' must be an integer, got {v!r}")
    if kind is float and not math.isfinite(x):
        raise ConfigError(f"'{name}' must be finite, got {v!r}")
    return x


def _profile(v, name):
    """Scalar or ``{lattice: {...}}`` / ``{bump: {...}}`` descriptor."""
    if v is None:
        return 0.0
    if not isinstance(v, dict):
        return _num(v, name)
    if len(v) != 1:
        raise ConfigError(f"'{name}' must hold exactly one descriptor, got {sorted(v)}")
    (kind, args), = v.items()
    args = args or {}
    try:
        if kind == "lattice":
            return Lattice(**{k: _num(a, f"{name}.lattice.{k}") for k, a in args.items()})
        if kind == "bump":
            conv = {}
            for k, a in args.items():
                if k == "center":
                    conv[k] = tuple(_num(c, f"{name}.bump.center") for c in a)
                else:
                    conv[k] = _num(a, f"{name}.bump.{k}")
            return Bump(**conv)
    except TypeError as exc:
        raise ConfigError(f"bad arguments for '{name}.{kind}': {exc}") from None
    raise ConfigError(f"unknown descriptor '{kind}' for '{name}' (expected lattice or bump)")


def build_problem(raw: dict) -> ProblemSpec:
    N = _num(raw["N"], "problem.N", int)
    M = _num(raw["M"], "problem.M", int)
    L = _num(raw["L"], "problem.L")
    alpha = _num(raw["alpha"], "problem.alpha")
    pot, nl = raw["potential"], raw["nonlinearity"]
    try:
        grid = TorusGrid(N, L, M)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    coercive = None
    if pot.get("coercive"):
        c = pot["coercive"]
        try:
            coercive = PowerWell(**{k: _num(a, f"problem.potential.coercive.{k}") for k, a in c.items()})
        except TypeError as exc:
            raise ConfigError(f"bad coercive descriptor: {exc}") from None
    potential = PotentialSpec(
        kind=str(pot["class"]),
        v_per=_profile(pot["V_per"], "problem.potential.V_per"),
        v_loc=_profile(pot["V_loc"], "problem.potential.V_loc"),
        coercive=coercive,
        mu=_num(pot["mu"], "problem.potential.mu"),
    )
    nonlin = NonlinearitySpec(
        p=_num(nl["p"], "problem.nonlinearity.p"),
        q=_num(nl["q"], "problem.nonlinearity.q"),
        gamma=_profile(nl["gamma"], "problem.nonlinearity.gamma"),
        K=_profile(nl["K"], "problem.nonlinearity.K"),
    )
    try:
        return ProblemSpec(grid, alpha, potential, nonlin)
    except (InvalidSpec, FracNLSError) as exc:
        raise ConfigError(str(exc)) from None


def _solver(raw: dict) -> SolverOptions:
    try:
        return SolverOptions(
            tol_E=_num(raw["tol_E"], "solver.tol_E"),
            tol_g=_num(raw["tol_g"], "solver.tol_g"),
            max_iter=_num(raw["max_iter"], "solver.max_iter", int),
            starts=_num(raw["starts"], "solver.starts", int),
            seed=_num(raw["seed"], "solver.seed", int),
            workers=_num(raw["workers"], "solver.workers", int),
        )
    except InvalidSpec as exc:
        raise ConfigError(str(exc)) from None


def _check_task_options(cfg: dict):
    ev = cfg["evolve"]
    for k in ("T", "dt", "omega"):
        ev[k] = _num(ev[k], f"evolve.{k}")
    ev["store_every"] = _num(ev["store_every"], "evolve.store_every", int)
    if not (ev["dt"] > 0 and ev["T"] >= 0 and ev["store_every"] >= 1):
        raise ConfigError("evolve needs dt > 0, T >= 0, store_every >= 1")
    val = cfg["validate"]
    val["fields"] = _num(val["fields"], "validate.fields", int)
    val["eps"] = [_num(e, "validate.eps") for e in val["eps"]]
    if any(e <= 0 for e in val["eps"]):
        raise ConfigError("validate.eps entries must be positive")
    if val["alphas"] is not None:
        val["alphas"] = [_num(a, "validate.alphas") for a in val["alphas"]]
    di = cfg["dichotomy"]
    for k in ("near_tol", "refine_order"):
        di[k] = _num(di[k], f"dichotomy.{k}")
        if di[k] <= 0:
            raise ConfigError(f"dichotomy.{k} must be positive")
    if di["escape_max"] is not None:
        di["escape_max"] = _num(di["escape_max"], "dichotomy.escape_max")
    if not isinstance(di["refine"], bool):
        raise ConfigError(f"dichotomy.refine must be true or false, got {di['refine']!r}")
    dec = cfg["decompose"]
    for k in ("u0_width", "profile_width", "profile_amplitude"):
        dec[k] = _num(dec[k], f"decompose.{k}")
    sw = cfg["sweep"]
    if not isinstance(sw["values"], list):
        raise ConfigError("sweep.values must be a list")
    fm = cfg["output"]["formats"]
    bad = set(fm) - {"json", "csv", "ngsf"}
    if bad:
        raise ConfigError(f"unknown output formats {sorted(bad)}")


def _parse_yaml(text: str, source: str):
    try:
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        where = f"{source}:{mark.line + 1}:{mark.column + 1}" if mark else source
        raise ConfigError(f"{where}: {exc.problem or exc.context}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be a mapping")
    return data


def load_config(path, *, task: str | None = None, out: str | None = None, seed: int | None = None) -> RunConfig:
    """Parse and fully validate a run configuration."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return config_from_dict(_parse_yaml(text, str(path)), task=task, out=out, seed=seed, source=str(path))


def config_from_dict(data: dict, *, task=None, out=None, seed=None, source=None) -> RunConfig:
    cfg = _merge(DEFAULTS, data, "")
    if cfg["schema_version"] != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {cfg['schema_version']} (expected {SCHEMA_VERSION})")
    if task is not None:
        cfg["task"] = task
    if cfg["task"] not in TASKS:
        raise ConfigError(f"task must be one of {TASKS}, got {cfg['task']!r}")
    if out is not None:
        cfg["output"]["dir"] = str(out)
    if seed is not None:
        cfg["solver"]["seed"] = int(seed)
    problem = build_problem(cfg["problem"])
    solver = _solver(cfg["solver"])
    _check_task_options(cfg)
    _normalize_echo(cfg, problem, solver)
    if cfg["task"] == "dichotomy" and problem.potential.kind != "close_to_periodic":
        raise ConfigError("task dichotomy needs potential class close_to_periodic")
    if cfg["task"] == "sweep":
        for v in cfg["sweep"]["values"]:
            config_from_dict(_set_dotted(copy.deepcopy(data), cfg["sweep"]["parameter"], v), task="solve")
    return RunConfig(
        task=cfg["task"],
        problem=problem,
        solver=solver,
        options={k: cfg[k] for k in ("validate", "dichotomy", "evolve", "decompose", "sweep")},
        output_dir=Path(cfg["output"]["dir"]),
        formats=list(cfg["output"]["formats"]),
        effective=cfg,
        source=source,
    )


def _normalize_echo(cfg: dict, problem: ProblemSpec, solver: SolverOptions) -> None:
    """Store parsed numbers (not their source strings) in the echoed configuration."""
    pr = cfg["problem"]
    pr["N"], pr["M"] = problem.grid.dim, problem.grid.points[0]
    pr["L"], pr["alpha"] = problem.grid.length[0], problem.alpha
    pr["potential"]["mu"] = float(problem.potential.mu)
    pr["nonlinearity"]["p"], pr["nonlinearity"]["q"] = problem.p, problem.q
    for key in ("V_per", "V_loc"):
        if not isinstance(pr["potential"][key], dict):
            pr["potential"][key] = float(pr["potential"][key] or 0.0)
    for key in ("gamma", "K"):
        if not isinstance(pr["nonlinearity"][key], dict):
            pr["nonlinearity"][key] = float(pr["nonlinearity"][key] or 0.0)
    cfg["solver"] = {k: getattr(solver, k) for k in cfg["solver"]}


def _set_dotted(data: dict, dotted: str, value):
    keys = dotted.split(".")
    cur = data
    for k in keys[:-1]:
        cur = cur.setdefault(k, {})
    cur[keys[-1]] = value
    return data


# --- output helpers ---------------------------------------------------------------------


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, Path):
        return str(x)
    return x


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])


class _Run:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.out = cfg.output_dir
        self.out.mkdir(parents=True, exist_ok=True)
        self.outputs: list = []
        self.timings: dict = {}
        self.notes: dict = {}

    def want(self, fmt):
        return fmt in self.cfg.formats

    def json(self, name, obj):
        if self.want("json"):
            _write_json(self.out / name, obj)
            self.outputs.append(name)

    def csv(self, name, header, rows):
        if self.want("csv"):
            _write_csv(self.out / name, header, rows)
            self.outputs.append(name)

    def field(self, name, u):
        if self.want("ngsf"):
            write_field(self.out / name, u, self.cfg.problem.alpha)
            self.outputs.append(name)

    def timed(self, label, fn, *a, **k):
        t0 = time.perf_counter()
        try:
            return fn(*a, **k)
        finally:
            self.timings[label] = time.perf_counter() - t0


# --- tasks ---------------------------------------------------------------------------------


def _solve(run: _Run, spec=None, tag=""):
    spec = spec or run.cfg.problem
    try:
        rep = run.timed(f"solve{tag}", minimize, spec, run.cfg.solver)
        status = EXIT_OK
    except NotConverged as exc:
        rep, status = exc.report, EXIT_INCONCLUSIVE
    return rep, status


def task_solve(run: _Run) -> int:
    rep, status = _solve(run)
    er = energy(rep.minimizer, run.cfg.problem)
    out = rep.to_dict()
    out["energy"] = er.to_dict()
    run.json("report.json", out)
    run.csv("energy.csv", er.csv_header(), [er.csv_row()])
    run.field("minimizer.ngsf", rep.minimizer)
    return status


def _random_corpus(grid: TorusGrid, n: int, rng: np.random.Generator):
    """Sums of 1-3 Gaussians with random centers, widths and signs, well inside the box."""
    Lmin = min(grid.length)
    out = []
    for _ in range(n):
        vals = np.zeros(grid.shape)
        for _ in range(int(rng.integers(1, 4))):
            w = rng.uniform(0.04, 0.08) * Lmin
            c = rng.uniform(-0.05, 0.05, grid.dim) * np.asarray(grid.length)
            r2 = sum((x - ci) ** 2 for x, ci in zip(grid.coords, c))
            vals = vals + rng.uniform(-1.0, 1.0) * np.exp(-r2 / (2 * w * w))
        out.append(Field(grid, vals))
    return out


def task_validate(run: _Run) -> int:
    spec = run.cfg.problem
    opts = run.cfg.options["validate"]
    g = spec.grid
    N = g.dim
    rng = np.random.default_rng(run.cfg.seed)
    corpus = _random_corpus(g, opts["fields"], rng)
    alphas = opts["alphas"] or [spec.alpha]
    summary = {"hardy": {}, "constants": {}}
    reports, labels = [], []
    for a in alphas:
        hc = HardyConstants.of(N, a)
        summary["constants"][repr(a)] = asdict(hc)
        rs = [hardy_check(u, hc) for u in corpus]
        reports += rs
        labels += [f"alpha={a:g}/field={i}" for i in range(len(rs))]
        summary["hardy"][repr(a)] = {
            "violations": sum(not r.passed for r in rs),
            "min_relative_slack": min(r.slack / r.lhs for r in rs if r.lhs > 0),
        }
    if run.want("csv"):
        write_hardy_csv(run.out / "hardy.csv", reports, labels)
        run.outputs.append("hardy.csv")
    # norm equivalence for the configured coupling (or half the critical one)
    mu = spec.mu if spec.mu else 0.5 * mu_star(N, spec.alpha)
    hspec = spec.with_potential(
        PotentialSpec("hardy", spec.potential.v_per, spec.potential.v_loc, mu=mu)
    ) if spec.potential.kind != "coercive" else None
    if hspec is not None:
        D = 0.5 * (1 - mu / mu_star(N, spec.alpha))
        ratios = []
        for u in corpus:
            r = energy(u, hspec)
            ratios.append((r.norm_sq - r.hardy_term) / r.norm_sq)
        summary["norm_equivalence"] = {
            "mu": mu,
            "D": D,
            "min_ratio": min(ratios),
            "max_ratio": max(ratios),
            "violations": sum(not (D <= x <= 1.0) for x in ratios),
        }
    r = opts["gn_r"]
    # default: midway exponent r + 1 = 2*_alpha / 2 + 1
    r = 0.5 * (2.0 * N / (N - spec.alpha)) if r is None else float(r)
    gn = [gn_check(u, r, spec.alpha).ratio for u in corpus]
    summary["gagliardo_nirenberg"] = {"r": r, "empirical_constant": max(gn)}
    summary["epsilon_bound"] = [
        {"eps": e, "C": epsilon_bound_check(spec.nonlinearity, e, grid=g).C} for e in opts["eps"]
    ]
    run.json("validate.json", summary)
    bad = sum(v["violations"] for v in summary["hardy"].values())
    bad += summary.get("norm_equivalence", {}).get("violations", 0)
    return EXIT_OK if bad == 0 else EXIT_ERROR


def task_dichotomy(run: _Run) -> int:
    spec = run.cfg.problem
    per = spec.periodic_part()
    opts = run.cfg.options["dichotomy"]
    shifts = None
    if opts["escape_max"] is not None:
        step = per.translation_step() or 1
        hi = int(round(float(opts["escape_max"]) / spec.grid.spacing[0]))
        shifts = list(range(step, hi + 1, step))
    status = EXIT_OK
    try:
        rep = run.timed("dichotomy", dichotomy_probe, spec, per, run.cfg.solver,
                        escape_shifts=shifts, near_tol=opts["near_tol"],
                        refine=opts["refine"], refine_order=opts["refine_order"])
    except Inconclusive as exc:
        rep, status = exc.report, EXIT_INCONCLUSIVE
    d = rep.to_dict()
    d.pop("timings", None)
    run.json("dichotomy.json", d)
    if rep.escape_energies:
        run.csv("escape.csv", ["shift_cells", "energy"],
                [[s[0], e] for s, e in zip(rep.escape_shifts, rep.escape_energies)])
    return status


def task_evolve(run: _Run) -> int:
    spec = run.cfg.problem
    opts = run.cfg.options["evolve"]
    rep, status = _solve(run)
    u = rep.minimizer
    traj = run.timed("evolve", evolve, u, opts["omega"], spec, opts["T"], opts["dt"],
                     store_every=opts["store_every"], reference=u)
    run.notes["omega_convention"] = (
        "Psi = exp(-i omega t) u with potential V + omega in the time-dependent equation; "
        "omega cancels for a stationary profile"
    )
    run.json("evolve.json", {
        "omega": opts["omega"], "T": opts["T"], "dt": opts["dt"], "steps": traj.steps,
        "mass_drift": traj.mass_drift, "max_modulus_deviation": traj.max_modulus_deviation,
        "c_value": rep.c_value, "snapshot_times": traj.times,
    })
    if run.want("ngsf"):
        write_complex_sequence(run.out / "trajectory.ngsf", spec.grid, traj.snapshots, spec.alpha)
        run.outputs.append("trajectory.ngsf")
    return status


def _gaussian(grid, width, amp=1.0):
    r2 = sum(x * x for x in grid.coords)
    return Field(grid, amp * np.exp(-np.broadcast_to(r2, grid.shape) / (2 * width * width)))


def task_decompose(run: _Run) -> int:
    spec = run.cfg.problem
    opts = run.cfg.options["decompose"]
    g = spec.grid
    seps = opts["separations"]
    if seps is None:
        seps = [g.length[0] / 8, g.length[0] / 4, g.length[0] / 2]
    cells = []
    for s in seps:
        c = float(s) / g.spacing[0]
        if abs(c - round(c)) > 1e-9:
            raise ConfigError(f"separation {s} is not a whole number of cells")
        cells.append(int(round(c)))
    u0 = _gaussian(g, opts["u0_width"])
    w = _gaussian(g, opts["profile_width"], opts["profile_amplitude"])
    bundle = ProfileBundle(u0, [w], [[[c] + [0] * (g.dim - 1) for c in cells]])
    rows = []
    for n in range(bundle.length):
        r = decomposition_energy_check(bundle, n, spec)
        rows.append([r.separation, r.deviation, r.deviation_without_correction, r.relative_deviation])
    devs = [r[1] for r in rows]
    summary = {
        "separations": [r[0] for r in rows],
        "deviation": devs,
        "deviation_without_correction": [r[2] for r in rows],
        "relative_deviation": [r[3] for r in rows],
        "decreasing": all(b < a for a, b in zip(devs, devs[1:])),
    }
    run.json("decompose.json", summary)
    run.csv("decompose.csv", ["separation", "deviation", "deviation_without_correction", "relative"], rows)
    return EXIT_OK


def task_sweep(run: _Run) -> int:
    sw = run.cfg.options["sweep"]
    base = copy.deepcopy(run.cfg.effective)
    rows, status = [], EXIT_OK
    for i, v in enumerate(sw["values"]):
        raw = _set_dotted(copy.deepcopy(base), sw["parameter"], v)
        spec = build_problem(raw["problem"])
        rep, st = _solve(run, spec, tag=f"[{i}]")
        status = max(status, st)
        er = energy(rep.minimizer, spec)
        rows.append([v, rep.c_value, rep.iterations, int(rep.converged)] + [getattr(er, k) for k in er.csv_header()])
    header = [sw["parameter"], "c_value", "iterations", "converged"] + EnergyReport.csv_header()
    run.csv("sweep.csv", header, rows)
    run.json("sweep.json", {"parameter": sw["parameter"], "rows": rows})
    return status


TASK_FUNCS = {
    "solve": task_solve,
    "validate": task_validate,
    "dichotomy": task_dichotomy,
    "evolve": task_evolve,
    "decompose": task_decompose,
    "sweep": task_sweep,
}


def _versions():
    return {
        "fracnls": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pyyaml": yaml.__version__,
    }


def run(cfg: RunConfig) -> int:
    """Execute the configured task and write its artifacts; returns the exit status."""
    r = _Run(cfg)
    t0 = time.perf_counter()
    error = None
    try:
        status = TASK_FUNCS[cfg.task](r)
    except (NotConverged, Inconclusive) as exc:
        status, error = EXIT_INCONCLUSIVE, f"{type(exc).__name__}: {exc}"
    except FracNLSError as exc:
        status, error = EXIT_ERROR, f"{type(exc).__name__}: {exc}"
    r.timings["total"] = time.perf_counter() - t0
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "task": cfg.task,
        "config_source": cfg.source,
        "effective_config": cfg.effective,
        "seed": cfg.seed,
        "threads_env": THREADS_ENV,
        "versions": _versions(),
        "timings": r.timings,
        "outputs": r.outputs,
        "exit_status": status,
        "error": error,
        "notes": r.notes,
    }
    _write_json(r.out / "manifest.json", manifest)
    if error:
        print(error, file=sys.stderr)
    return status


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="fracnls", description=__doc__.splitlines()[0])
    parser.add_argument("task", choices=TASKS)
    parser.add_argument("--config", required=True, help="YAML run configuration")
    parser.add_argument("--out", help="output directory (overrides output.dir)")
    parser.add_argument("--seed", type=int, help="random seed (overrides solver.seed)")
    args = parser.parse_args(argv)
    if args.seed is not None and not (0 <= args.seed < 2**64):
        print("seed must be an unsigned 64-bit integer", file=sys.stderr)
        return EXIT_ERROR
    try:
        cfg = load_config(args.config, task=args.task, out=args.out, seed=args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
