"""Scenario execution: JSON configs in, CSV/JSON diagnostics out.

A scenario file fully determines a run (grid, solver settings, cylinder,
seed, enabled checks), so identical files produce bit-identical output.
Sweeps fan the same scenario across one axis and a single collector
writes rows in axis order regardless of worker scheduling.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import _kernels as K
from .cylinders import Cylinder, ShrinkSchedule, average, level_schedule, \
    scale_factor_A, sup_over
from .degiorgi import thm1_exponent, verify_degiorgi
from .energy import build_cutoff, caccioppoli_sides
from .errors import (ConfigError, GridTooCoarse, NonConvergence,
                     InsufficientData, ParaboundError)
from .fields import random_nonneg, smooth_positive_initial
from .grid import Grid, SpaceTimeField
from .iteration2 import (classical_bounds, delta0_root, second_iteration,
                         thm2_exponent)
from .levelset import measure_bound_check
from .solver import SolverConfig, clipped_nonneg, exact_power, solve
from .structure import StructureParams, default_eps0

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_VERIFY = 4

# Frozen theorem constants for pass/fail verification, calibrated once
# over the shipped scenario suite with headroom (see the acceptance
# tests); the bound statements are existential in C, so checks assert
# the fitted constant stays under these.
DEFAULT_THM1_C = 3.0
DEFAULT_THM2_C = 16.0
DEFAULT_CLASSICAL_C = 8.0

_CHECK_NAMES = ("energy", "degiorgi", "thm1", "thm2", "classical")
_RECIPES = ("zero", "smooth", "random", "bump", "exact_power")
_NAME_RE = re.compile(r"^[A-Za-z0-9_.-]+$")

_REQUIRED = ("name", "p", "N", "nx", "nt", "dt", "extent",
             "rho", "theta", "sigma")
_OPTIONAL = {"delta": 1e-8, "newton_tol": 1e-10, "scenario": "smooth",
             "seed": 0, "amplitude": 1.0, "B": 1.0, "k_override": None,
             "checks": None, "sweep": None}

SWEEP_COLUMNS = ("p", "N", "thm1_exp", "thm2_exp", "deg_exp", "sing_exp",
                 "delta0", "sigma", "nx", "sup", "thm1_const", "thm2_const",
                 "thm1_bound", "thm2_bound", "thm1_ratio", "thm2_ratio")


@dataclass(frozen=True)
class Scenario:
    name: str
    p: float
    N: int
    nx: int
    nt: int
    dt: float
    extent: float
    rho: float
    theta: float
    sigma: float
    delta: float = 1e-8
    newton_tol: float = 1e-10
    scenario: str = "smooth"
    seed: int = 0
    amplitude: float = 1.0
    B: float = 1.0
    k_override: float | None = None
    checks: tuple = _CHECK_NAMES
    sweep: dict | None = None

    def grid(self) -> Grid:
        return Grid(dim=self.N, extent=self.extent, nx=self.nx,
                    nt=self.nt, dt=self.dt)

    def solver_config(self) -> SolverConfig:
        params = StructureParams(n_dim=self.N, p=self.p,
                                 eps0=default_eps0(self.N))
        return SolverConfig(params=params, delta=self.delta,
                            newton_tol=self.newton_tol)


def scenario_from_dict(doc: dict) -> Scenario:
    """Validates a parsed scenario document; every defect raises
    ConfigError with the offending key named."""
    if not isinstance(doc, dict):
        raise ConfigError("scenario document must be a JSON object")
    known = set(_REQUIRED) | set(_OPTIONAL)
    for key in doc:
        if key not in known:
            raise ConfigError(f"unknown scenario key: {key}")
    for key in _REQUIRED:
        if key not in doc:
            raise ConfigError(f"missing scenario key: {key}")

    name = doc["name"]
    if not isinstance(name, str) or not _NAME_RE.match(name):
        raise ConfigError("name must match [A-Za-z0-9_.-]+")

    def num(key, default=None, lo=None, lo_open=True):
        v = doc.get(key, default)
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise ConfigError(f"{key} must be a number")
        v = float(v)
        if lo is not None and (v <= lo if lo_open else v < lo):
            raise ConfigError(f"{key} out of range: {v}")
        return v

    def integer(key, lo):
        v = doc[key]
        if not isinstance(v, int) or isinstance(v, bool) or v < lo:
            raise ConfigError(f"{key} must be an integer >= {lo}")
        return v

    p = num("p", lo=1.0)
    n_dim = integer("N", 1)
    if n_dim not in (1, 2):
        raise ConfigError("N must be 1 or 2")
    nx = integer("nx", 3)
    if nx % 2 == 0:
        raise ConfigError("nx must be odd")
    nt = integer("nt", 2)
    recipe = doc.get("scenario", "smooth")
    if recipe not in _RECIPES:
        raise ConfigError(f"scenario must be one of {_RECIPES}")
    if recipe == "exact_power" and n_dim != 1:
        raise ConfigError("exact_power scenario requires N = 1")

    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) \
            or not (0 <= seed < 2 ** 64):
        raise ConfigError("seed must be an integer in [0, 2^64)")

    k_override = doc.get("k_override")
    if k_override is not None:
        k_override = num("k_override", lo=0.0)

    checks = doc.get("checks")
    if checks is None:
        enabled = _CHECK_NAMES
    else:
        if not isinstance(checks, dict):
            raise ConfigError("checks must be an object of booleans")
        for key, val in checks.items():
            if key not in _CHECK_NAMES or not isinstance(val, bool):
                raise ConfigError(f"bad check toggle: {key}")
        enabled = tuple(c for c in _CHECK_NAMES if checks.get(c, False))

    sweep = doc.get("sweep")
    if sweep is not None:
        if not isinstance(sweep, dict):
            raise ConfigError("sweep must be an object of axis lists")
        for axis, vals in sweep.items():
            if axis not in ("p", "sigma", "grid"):
                raise ConfigError(f"unknown sweep axis: {axis}")
            if not isinstance(vals, list) or not vals:
                raise ConfigError(f"sweep axis {axis} must be non-empty")
            for v in vals:
                if axis == "grid":
                    if not isinstance(v, int) or v < 3 or v % 2 == 0:
                        raise ConfigError("grid sweep values must be odd "
                                          "integers >= 3")
                elif not isinstance(v, (int, float)) or isinstance(v, bool):
                    raise ConfigError(f"sweep axis {axis} must be numeric")

    sc = Scenario(
        name=name, p=p, N=n_dim, nx=nx, nt=nt,
        dt=num("dt", lo=0.0), extent=num("extent", lo=0.0),
        rho=num("rho", lo=0.0), theta=num("theta", lo=0.0),
        sigma=num("sigma", lo=0.0),
        delta=num("delta", _OPTIONAL["delta"], lo=0.0),
        newton_tol=num("newton_tol", _OPTIONAL["newton_tol"], lo=0.0),
        scenario=recipe, seed=seed,
        amplitude=num("amplitude", 1.0, lo=0.0, lo_open=False),
        B=num("B", 1.0, lo=0.0), k_override=k_override,
        checks=enabled, sweep=sweep,
    )
    if sc.sigma >= 1:
        raise ConfigError("sigma must be in (0,1)")
    try:
        grid = sc.grid()
    except ParaboundError as exc:
        raise ConfigError(f"bad grid: {exc}") from exc
    if not Cylinder(sc.rho, sc.theta).fits(grid):
        raise ConfigError(
            f"cylinder (rho={sc.rho}, theta={sc.theta}) does not fit the "
            f"grid (extent={sc.extent}, t_half={grid.t_half})")
    return sc


def load_scenario(path) -> Scenario:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"scenario file is not valid JSON: {exc}") from exc
    return scenario_from_dict(doc)


def _initial_and_bc(sc: Scenario, grid: Grid, rng: np.random.Generator):
    """Initial slice and Dirichlet data for each recipe; exact_power
    pins the boundary to the exact solution so the march can be checked
    against it."""
    if sc.scenario == "zero":
        return np.zeros(grid.shape[:-1]), None
    if sc.scenario == "smooth":
        return smooth_positive_initial(grid, sc.amplitude), None
    if sc.scenario == "bump":
        base = smooth_positive_initial(grid, sc.amplitude)
        return base + 0.5 * sc.amplitude * np.cos(
            0.5 * np.pi * grid.radius() / grid.extent) ** 2, None
    if sc.scenario == "random":
        vals = random_nonneg(grid, rng, amplitude=sc.amplitude).values
        return vals[..., 0], None
    exact = exact_power(sc.B, sc.p, grid)
    return exact.values[..., 0], exact.values


def _write_csv(path: Path, header: list, rows: list, meta: dict) -> None:
    buf = io.StringIO()
    for key, val in meta.items():
        buf.write(f"# {key}={val}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    path.write_text(buf.getvalue())


def _fitted_theorem_constants(sup_inner: float, avg_pe: float, avg_p: float,
                              sc: Scenario) -> dict:
    """Required main-branch constants: the smallest C for which each
    improved bound's moment term alone covers the observed sup."""
    out = {}
    e1 = thm1_exponent(sc.p, sc.N)
    a_cap = scale_factor_A(sc.rho, sc.theta, sc.N, sc.p)
    x1 = a_cap ** e1 / (1.0 - sc.sigma) ** ((sc.N + sc.p) * e1) \
        * avg_pe ** e1
    out["thm1_exp"] = e1
    out["thm1_main"] = x1
    out["thm1_const"] = sup_inner / x1 if x1 > 0 else math.inf

    if sc.p > 2.0 * sc.N / (sc.N + 1):
        e2 = thm2_exponent(sc.p, sc.N)
        x2 = a_cap ** e2 * avg_p ** e2 \
            / (sc.sigma ** (e2 * (sc.N + 1))
               * (1.0 - sc.sigma) ** (e2 * (sc.N + sc.p)))
        out["thm2_exp"] = e2
        out["thm2_main"] = x2
        out["thm2_const"] = sup_inner / x2 if x2 > 0 else math.inf
    else:
        out["thm2_exp"] = None
        out["thm2_main"] = None
        out["thm2_const"] = None
    return out


def run_scenario(sc: Scenario, out_dir, seed: int | None = None):
    """Solves the scenario and runs its enabled checks.

    Writes <name>_trace.csv, <name>_levelset.csv, <name>_energy.csv and
    <name>_summary.json under out_dir.  Returns (exit_code, summary).
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    run_seed = sc.seed if seed is None else seed
    rng = np.random.default_rng(run_seed)
    grid = sc.grid()
    config = sc.solver_config()
    meta = {"scenario": sc.name, "generator": "PCG64", "seed": run_seed,
            "backend": K.BACKEND}
    summary = {"name": sc.name, "seed": run_seed, "backend": K.BACKEND,
               "p": sc.p, "N": sc.N, "sigma": sc.sigma, "rho": sc.rho,
               "theta": sc.theta, "checks": {}, "satisfied": {}}

    initial, bc = _initial_and_bc(sc, grid, rng)
    try:
        field = solve(initial, config, grid, bc=bc)
    except NonConvergence as exc:
        summary["error"] = f"solver did not converge: {exc}"
        _write_summary(out, sc.name, summary)
        return EXIT_SOLVER, summary
    u = clipped_nonneg(field)

    base_cyl = Cylinder(sc.rho, sc.theta)
    schedule = ShrinkSchedule(sc.sigma, base_cyl)
    sup_inner = sup_over(grid, u.values, schedule.inner())
    eps0 = default_eps0(sc.N)
    avg_pe = average(grid, u.values ** (sc.p + eps0), base_cyl)
    avg_p = average(grid, u.values ** sc.p, base_cyl)
    summary["sup_inner"] = sup_inner
    summary["avg_p_eps0"] = avg_pe
    summary["avg_p"] = avg_p

    fits = _fitted_theorem_constants(sup_inner, avg_pe, avg_p, sc)
    summary.update(fits)

    k_for_diag = 1.0
    if "degiorgi" in sc.checks:
        res = verify_degiorgi(u, sc.p, sc.N, sc.sigma, sc.rho, sc.theta,
                              k_override=sc.k_override)
        k_for_diag = res.k
        _write_csv(out / f"{sc.name}_trace.csv",
                   ["i", "rho_i", "theta_i", "k_i", "Y_i", "predicted",
                    "ratio"],
                   res.trace.csv_rows(), meta)
        summary["checks"]["degiorgi"] = {
            "k": res.k, "sup_inner": res.sup_inner, "c0_fit": res.c0_fit,
            "threshold": res.threshold,
            "y0_below_threshold": res.y0_below_threshold,
            "y_final": res.y_final, "decayed": res.decayed,
        }
        summary["satisfied"]["degiorgi"] = res.satisfied

    if "energy" in sc.checks or "degiorgi" in sc.checks:
        ls_rows, en_rows = [], []
        ls_ok = en_ok = True
        for i in range(6):
            try:
                lhs, rhs = measure_bound_check(u, schedule, k_for_diag, i,
                                               s=sc.p)
            except ParaboundError:
                break
            ratio = lhs / rhs if rhs > 0 else 0.0
            ls_ok &= lhs <= rhs * (1.0 + 1e-12) + 1e-300
            ls_rows.append([i, lhs, rhs, ratio])
        for i in range(4):
            try:
                cutoff = build_cutoff(schedule, i, kind="full", grid=grid)
            except GridTooCoarse:
                break
            k_i1 = level_schedule(k_for_diag, i + 1)
            sides = caccioppoli_sides(u, k_i1, cutoff, sc.p)
            c_fit = sides.fitted_constant()
            en_ok &= all(math.isfinite(v) for v in
                         (sides.lhs_sup, sides.lhs_grad, sides.rhs_space,
                          sides.rhs_time)) and not math.isnan(c_fit)
            en_rows.append([i, k_i1, sides.lhs_sup, sides.lhs_grad,
                            sides.rhs_space, sides.rhs_time, c_fit])
        if "energy" in sc.checks:
            _write_csv(out / f"{sc.name}_levelset.csv",
                       ["i", "lhs", "rhs", "ratio"], ls_rows, meta)
            _write_csv(out / f"{sc.name}_energy.csv",
                       ["i", "k", "lhs_sup", "lhs_grad", "rhs_space",
                        "rhs_time", "C_fit"], en_rows, meta)
            summary["checks"]["energy"] = {
                "levelset_rows": len(ls_rows), "energy_rows": len(en_rows)}
            summary["satisfied"]["energy"] = bool(ls_ok and en_ok)

    if "thm1" in sc.checks:
        ok = sup_inner <= 1.0 + 1e-12 \
            or fits["thm1_const"] <= DEFAULT_THM1_C
        summary["satisfied"]["thm1"] = bool(ok)

    if "thm2" in sc.checks and fits["thm2_const"] is not None:
        it2 = second_iteration(u, sc.p, sc.N, sc.sigma, sc.rho, sc.theta)
        summary["checks"]["thm2"] = {
            "m_trace": list(it2.m_trace), "eta": it2.eta, "d": it2.d,
            "bb": it2.bb, "bb_lsq": it2.bb_lsq, "limit": it2.limit,
            "c_fit": it2.c_fit,
        }
        ok = (sup_inner <= 1.0 + 1e-12
              or fits["thm2_const"] <= DEFAULT_THM2_C) and it2.satisfied
        summary["satisfied"]["thm2"] = bool(ok)

    if "classical" in sc.checks:
        cb = classical_bounds(avg_p if sc.p != 2 else 0.0, sc.p, sc.N,
                              sc.sigma, sc.rho, sc.theta)
        blowup = cb.deg_exponent_blowup
        summary["checks"]["classical"] = {
            "deg_main": cb.deg.main if cb.deg else None,
            "deg_cap": cb.deg.cap if cb.deg else None,
            "sing_main": cb.sing.main if cb.sing else None,
            "sing_cap": cb.sing.cap if cb.sing else None,
            "exponent_blowup": None if math.isinf(blowup) else blowup,
        }
        ok = True
        for rep in (cb.deg, cb.sing):
            if rep is None:
                continue
            need = max(sup_inner - rep.cap, 0.0)
            ok &= need == 0.0 or (rep.main > 0 and
                                  need / rep.main <= DEFAULT_CLASSICAL_C)
        summary["satisfied"]["classical"] = bool(ok)

    _write_summary(out, sc.name, summary)
    failed = [c for c, ok in summary["satisfied"].items() if not ok]
    return (EXIT_VERIFY if failed else EXIT_OK), summary


def _write_summary(out: Path, name: str, summary: dict) -> None:
    (out / f"{name}_summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n")


def solve_only(sc: Scenario, out_dir, seed: int | None = None):
    """Solver dispatch without verification: writes the solution field
    in the binary layout plus a small JSON with the marching report."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    run_seed = sc.seed if seed is None else seed
    rng = np.random.default_rng(run_seed)
    grid = sc.grid()
    initial, bc = _initial_and_bc(sc, grid, rng)
    summary = {"name": sc.name, "seed": run_seed, "backend": K.BACKEND}
    try:
        field = solve(initial, sc.solver_config(), grid, bc=bc)
    except NonConvergence as exc:
        summary["error"] = f"solver did not converge: {exc}"
        _write_summary(out, sc.name, summary)
        return EXIT_SOLVER, summary
    field.save(out / f"{sc.name}_solution.bin")
    summary["max"] = float(field.values.max())
    summary["min"] = float(field.values.min())
    _write_summary(out, sc.name, summary)
    return EXIT_OK, summary


def _axis_variants(sc: Scenario, axis: str) -> list:
    if axis not in ("p", "sigma", "grid"):
        raise ConfigError(f"sweep axis must be p|sigma|grid, got {axis}")
    if not sc.sweep or axis not in sc.sweep:
        raise ConfigError(f"scenario has no sweep list for axis {axis}")
    vals = sc.sweep[axis]
    out = []
    for v in vals:
        if axis == "p":
            out.append((v, replace(sc, p=float(v))))
        elif axis == "sigma":
            if not 0 < v < 1:
                raise ConfigError(f"sweep sigma out of (0,1): {v}")
            out.append((v, replace(sc, sigma=float(v))))
        else:
            out.append((v, replace(sc, nx=int(v))))
    return out


def _sweep_point(sc: Scenario, run_seed: int) -> list:
    """One sweep row; raises NonConvergence/ParaboundError upward."""
    rng = np.random.default_rng(run_seed)
    grid = sc.grid()
    initial, bc = _initial_and_bc(sc, grid, rng)
    field = solve(initial, sc.solver_config(), grid, bc=bc)
    u = clipped_nonneg(field)
    base_cyl = Cylinder(sc.rho, sc.theta)
    schedule = ShrinkSchedule(sc.sigma, base_cyl)
    sup_inner = sup_over(grid, u.values, schedule.inner())
    eps0 = default_eps0(sc.N)
    avg_pe = average(grid, u.values ** (sc.p + eps0), base_cyl)
    avg_p = average(grid, u.values ** sc.p, base_cyl)
    fits = _fitted_theorem_constants(sup_inner, avg_pe, avg_p, sc)

    deg_exp = 1.0 / (sc.p - 2.0) if sc.p > 2 else None
    sing_exp = 1.0 / (2.0 - sc.p) if sc.p < 2 else None
    t1_bound = min(fits["thm1_main"], 1.0)
    t1_ratio = sup_inner / fits["thm1_main"] \
        if fits["thm1_main"] > 0 else math.inf
    if fits["thm2_main"] is not None:
        t2_bound = min(fits["thm2_main"], 1.0)
        t2_ratio = sup_inner / fits["thm2_main"] \
            if fits["thm2_main"] > 0 else math.inf
    else:
        t2_bound = t2_ratio = None

    def cell(v):
        return "" if v is None else v

    return [sc.p, sc.N, fits["thm1_exp"], cell(fits["thm2_exp"]),
            cell(deg_exp), cell(sing_exp), delta0_root(sc.N), sc.sigma,
            sc.nx, sup_inner, fits["thm1_const"],
            cell(fits["thm2_const"]), t1_bound, cell(t2_bound), t1_ratio,
            cell(t2_ratio)]


def run_sweep(sc: Scenario, axis: str, out_dir, jobs: int = 1,
              seed: int | None = None):
    """Runs the scenario once per value on the chosen axis and writes
    <name>_sweep_<axis>.csv.  Points may run concurrently; rows are
    collected and written in axis order by this single writer."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    run_seed = sc.seed if seed is None else seed
    variants = _axis_variants(sc, axis)
    if jobs < 1:
        raise ConfigError("jobs must be >= 1")

    def work(point):
        _, sub = point
        return _sweep_point(sub, run_seed)

    try:
        if jobs == 1:
            rows = [work(v) for v in variants]
        else:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                rows = list(pool.map(work, variants))
    except NonConvergence as exc:
        return EXIT_SOLVER, {"error": str(exc)}

    meta = {"scenario": sc.name, "generator": "PCG64", "seed": run_seed,
            "backend": K.BACKEND, "axis": axis}
    path = out / f"{sc.name}_sweep_{axis}.csv"
    _write_csv(path, list(SWEEP_COLUMNS), rows, meta)
    return EXIT_OK, {"rows": len(rows), "path": str(path)}


def read_sweep_csv(path) -> list:
    """Parses a sweep CSV (comment lines allowed) into dicts with floats
    and None for empty cells."""
    rows = []
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.DictReader(lines)
    for rec in reader:
        parsed = {}
        for key, val in rec.items():
            if val is None or val == "":
                parsed[key] = None
            else:
                try:
                    parsed[key] = float(val)
                except ValueError:
                    parsed[key] = val
        rows.append(parsed)
    return rows


@dataclass(frozen=True)
class StabilityReport:
    verdict: str
    max_smooth_jump: float
    reasons: tuple

    @property
    def passed(self) -> bool:
        return self.verdict == "PASS"


# Classical exponent magnitude demanded near p = 2.  At p = 2 +- 0.01
# the true magnitude is 100, but float64 evaluation of 1/|p-2| lands a
# few ulp under it on one side, hence the relative slack.
CLASSICAL_BLOWUP_FLOOR = 100.0 * (1.0 - 1e-12)


def stability_report(rows_or_path, jump_tol: float = 0.25,
                     near: float = 0.011) -> StabilityReport:
    """Verdict on a p-sweep: PASS iff the improved exponents and fitted
    constants move smoothly (adjacent relative jumps < jump_tol) while
    the classical exponent magnitudes blow past CLASSICAL_BLOWUP_FLOOR
    within |p-2| <= near and are absent at p = 2 itself."""
    rows = rows_or_path if isinstance(rows_or_path, list) \
        else read_sweep_csv(rows_or_path)
    if not rows or "p" not in rows[0]:
        raise InsufficientData("no p column in sweep rows")
    rows = sorted(rows, key=lambda r: r["p"])
    below = [r for r in rows if r["p"] < 2]
    above = [r for r in rows if r["p"] > 2]
    if len(below) < 3 or len(above) < 3:
        raise InsufficientData(
            f"need >= 3 p-values per side of 2, got {len(below)} below "
            f"and {len(above)} above")

    reasons = []
    max_jump = 0.0
    for col in ("thm1_exp", "thm2_exp", "thm1_const", "thm2_const"):
        vals = [r.get(col) for r in rows]
        if any(v is None for v in vals):
            reasons.append(f"{col} undefined somewhere on the sweep")
            continue
        for a, b in zip(vals, vals[1:]):
            denom = max(abs(a), abs(b))
            jump = 0.0 if denom == 0 else abs(a - b) / denom
            max_jump = max(max_jump, jump)
            if jump >= jump_tol:
                reasons.append(f"{col} jumps by {jump:.3f}")

    for r in rows:
        gap = r["p"] - 2.0
        mag = r.get("deg_exp") if gap > 0 else r.get("sing_exp")
        if gap == 0:
            if r.get("deg_exp") is not None or r.get("sing_exp") is not None:
                reasons.append("classical exponent defined at p = 2")
        elif abs(gap) <= near and (mag is None
                                   or mag < CLASSICAL_BLOWUP_FLOOR):
            reasons.append(f"classical magnitude too small at p={r['p']}")

    verdict = "PASS" if not reasons else "FAIL"
    return StabilityReport(verdict=verdict, max_smooth_jump=max_jump,
                           reasons=tuple(reasons))
