"""Command-line front end: config-driven sweeps with machine-readable output.

A single TOML config describes the geometry, the coupling profile, one
sweep axis, and the numerics.  Each requested task writes one CSV (fixed
17-significant-digit formatting), a plot-ready .dat file (whitespace
columns, '#' headers), and contributes pass/fail checks to a JSON summary.
Exit status: 0 all checks pass, 1 a numerical check failed, 2 bad config.
"""
from __future__ import annotations

import argparse
import json
import math
import multiprocessing
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import __version__
from .asymptotics import existence_criterion, weak_coupling_expansion
from .bskernel import assemble, grid_for_profile, hs_norm, make_grid
from .bounds import bracketing_bound, skn_bound_general, skn_bound_rectwell
from .oracle import transverse_fd_extrapolated
from .profiles import CouplingProfile, piecewise_profile, rectangular_well
from .spectrum import count_below, find_bound_states, solve_implicit_ground_state
from .transverse import Geometry, solve_modes

TASKS = ("modes", "spectrum", "asymptotics", "bounds", "oracle-validate", "hs-scaling")

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    geometry: Geometry
    alpha0: float
    n_max: int
    profile_spec: dict
    sweep_axis: str  # lambda | sigma | a | alpha1 | none
    sweep_values: tuple[float, ...]
    grid_n: int
    tol: float
    oracle_tol: float
    tasks: tuple[str, ...]
    seed: int
    raw: dict


_SCHEMA = {
    "geometry": {"d1", "d2"},
    "transverse": {"alpha0", "n_max"},
    "profile": {"type", "a", "alpha1", "breaks", "values", "file", "lam", "sigma"},
    "sweep": {"axis", "values"},
    "numerics": {"grid_n", "tol", "oracle_tol"},
    "run": {"tasks", "seed"},
}


def _reject_unknown(cfg: dict) -> None:
    for section, body in cfg.items():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        if not isinstance(body, dict):
            raise ConfigError(f"section [{section}] must be a table")
        for key in body:
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")


def _require(cfg: dict, section: str, key: str, default=None):
    body = cfg.get(section, {})
    if key not in body:
        if default is not None:
            return default
        raise ConfigError(f"missing key {key!r} in section [{section}]")
    return body[key]


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            cfg = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config parse error in {path}: {exc}") from exc
    _reject_unknown(cfg)

    d1 = float(_require(cfg, "geometry", "d1"))
    d2 = float(_require(cfg, "geometry", "d2"))
    alpha0 = float(_require(cfg, "transverse", "alpha0", 0.0))
    n_max = int(_require(cfg, "transverse", "n_max", 200))
    ptype = _require(cfg, "profile", "type")
    if ptype not in ("rectwell", "piecewise", "table"):
        raise ConfigError(f"profile type must be rectwell/piecewise/table, got {ptype!r}")
    axis = _require(cfg, "sweep", "axis", "none")
    if axis not in ("lambda", "sigma", "a", "alpha1", "none"):
        raise ConfigError(f"unknown sweep axis {axis!r}")
    values = tuple(float(v) for v in _require(cfg, "sweep", "values", [1.0]))
    if axis != "none" and len(values) == 0:
        raise ConfigError("sweep values must be nonempty")
    grid_n = int(_require(cfg, "numerics", "grid_n", 400))
    tol = float(_require(cfg, "numerics", "tol", 1e-10))
    oracle_tol = float(_require(cfg, "numerics", "oracle_tol", 1e-6))
    if tol <= 0 or oracle_tol <= 0 or grid_n < 2:
        raise ConfigError("numeric tolerances must be positive, grid_n >= 2")
    tasks = tuple(_require(cfg, "run", "tasks", list(TASKS)))
    if len(tasks) == 0:
        raise ConfigError("tasks must be nonempty")
    for t in tasks:
        if t not in TASKS:
            raise ConfigError(f"unknown task {t!r}")
    seed = int(_require(cfg, "run", "seed", 0))
    return RunConfig(geometry=Geometry(d1, d2), alpha0=alpha0, n_max=n_max,
                     profile_spec=dict(cfg.get("profile", {})), sweep_axis=axis,
                     sweep_values=values, grid_n=grid_n, tol=tol,
                     oracle_tol=oracle_tol, tasks=tasks, seed=seed, raw=cfg)


def build_profile(rc: RunConfig, **overrides) -> CouplingProfile:
    spec = rc.profile_spec
    lam = float(overrides.get("lam", spec.get("lam", 1.0)))
    sigma = float(overrides.get("sigma", spec.get("sigma", 1.0)))
    ptype = spec["type"]
    if ptype == "rectwell":
        a = float(overrides.get("a", spec.get("a", 1.0)))
        alpha1 = float(overrides.get("alpha1", spec.get("alpha1", rc.alpha0 - 1.0)))
        return rectangular_well(rc.alpha0, alpha1, a, lam=lam, sigma=sigma)
    if ptype == "piecewise":
        return piecewise_profile(rc.alpha0, spec["breaks"], spec["values"],
                                 lam=lam, sigma=sigma)
    rows = np.loadtxt(spec["file"], ndmin=2)
    if rows.shape[1] != 3:
        raise ConfigError("profile table needs rows: left right value")
    breaks = list(rows[:, 0]) + [rows[-1, 1]]
    if not np.allclose(rows[1:, 0], rows[:-1, 1]):
        raise ConfigError("profile table pieces must be contiguous")
    return piecewise_profile(rc.alpha0, breaks, rows[:, 2], lam=lam, sigma=sigma)


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


def write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def emit_plotdata(path: Path, header: list[str], rows: list[list],
                  comments: list[str] | None = None) -> None:
    """Whitespace-separated columns with '#' header comments."""
    if not rows:
        raise ValueError("emit_plotdata needs nonempty results")
    lines = [f"# {c}" for c in (comments or [])]
    lines.append("# " + " ".join(header))
    lines += [" ".join(_fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


# -- task implementations -----------------------------------------------------

def _sweep_profiles(rc: RunConfig) -> list[tuple[float, CouplingProfile]]:
    if rc.sweep_axis == "none":
        return [(0.0, build_profile(rc))]
    key = {"lambda": "lam", "sigma": "sigma", "a": "a", "alpha1": "alpha1"}[rc.sweep_axis]
    return [(v, build_profile(rc, **{key: v})) for v in rc.sweep_values]


def _spectrum_point(args):
    rc, value, profile = args
    basis = solve_modes(rc.geometry, rc.alpha0, rc.n_max)
    grid = grid_for_profile(profile, rc.grid_n)
    rep = find_bound_states(profile, basis, tol=rc.tol, grid=grid)
    e0 = rep.eigenvalues[0][0] if rep.eigenvalues else math.nan
    kap = math.sqrt(basis.nu1 - e0) if rep.eigenvalues else math.nan
    return [value, rep.count, e0, kap]


def task_modes(rc: RunConfig, out: Path, checks: dict) -> None:
    basis = solve_modes(rc.geometry, rc.alpha0, rc.n_max)
    rows = [[m.index, m.nu, m.chi0_sq] for m in basis.modes[:min(rc.n_max, 20)]]
    write_csv(out / "modes.csv", ["n", "nu_n", "chi0_sq"], rows)
    emit_plotdata(out / "modes.dat", ["n", "nu_n", "chi0_sq"], rows)
    checks["modes_sorted"] = bool(np.all(np.diff([r[1] for r in rows]) > 0))


def task_spectrum(rc: RunConfig, out: Path, checks: dict, jobs: int) -> None:
    work = [(rc, v, p) for v, p in _sweep_profiles(rc)]
    if jobs > 1:
        # spawn: forking after the threaded kernels initialize is unsafe
        ctx = multiprocessing.get_context("spawn")
        with ProcessPoolExecutor(max_workers=jobs, mp_context=ctx) as pool:
            rows = list(pool.map(_spectrum_point, work))
    else:
        rows = [_spectrum_point(w) for w in work]
    header = [rc.sweep_axis if rc.sweep_axis != "none" else "point",
              "n_states", "E_ground", "kappa1"]
    write_csv(out / "spectrum.csv", header, rows)
    emit_plotdata(out / "spectrum.dat", header, rows)
    checks["spectrum_counts_nonnegative"] = all(r[1] >= 0 for r in rows)


def task_asymptotics(rc: RunConfig, out: Path, checks: dict) -> None:
    basis = solve_modes(rc.geometry, rc.alpha0, rc.n_max)
    base = build_profile(rc)
    coeffs = weak_coupling_expansion(base, basis)
    rows = []
    for value, profile in _sweep_profiles(rc):
        grid = grid_for_profile(profile, rc.grid_n)
        sp = solve_implicit_ground_state(
            profile, basis,
            "SCALED_SIGMA" if rc.sweep_axis == "sigma" else "WEAK_LAMBDA",
            tol=rc.tol, grid=grid)
        k_solver = sp.kappa1 if sp else math.nan
        if rc.sweep_axis == "sigma":
            k1 = coeffs.c1_sigma * value
            k2 = k1 + coeffs.second_order_sigma(value)
        else:
            k1 = coeffs.c1_lambda * value
            k2 = coeffs.predict_kappa1_lambda(value)
        e_solver = basis.nu1 - k_solver**2 if sp else math.nan
        rem = abs(k_solver - k2) if sp else math.nan
        rows.append([value, e_solver, basis.nu1 - k1 * k1, basis.nu1 - k2 * k2, rem])
    header = [rc.sweep_axis, "E_solver", "E_expansion_1", "E_expansion_2", "remainder"]
    write_csv(out / "asymptotics.csv", header, rows)
    emit_plotdata(out / "asymptotics.dat", header, rows)
    checks["existence_criterion"] = existence_criterion(base) == bool(
        any(math.isfinite(r[4]) for r in rows))
    finite = [(v, r) for (v, _), r in zip(_sweep_profiles(rc), [row[4] for row in rows])
              if math.isfinite(r) and r > 0]
    if len(finite) >= 3 and rc.sweep_axis in ("lambda", "sigma"):
        vs = np.log([f[0] for f in finite])
        rs = np.log([f[1] for f in finite])
        slope = float(np.polyfit(vs, rs, 1)[0])
        checks["remainder_slope"] = slope
        checks["remainder_slope_ok"] = bool(abs(slope - 3.0) <= 0.4)


def task_bounds(rc: RunConfig, out: Path, checks: dict) -> None:
    basis = solve_modes(rc.geometry, rc.alpha0, rc.n_max)
    rows = []
    chain_ok = True
    for value, profile in _sweep_profiles(rc):
        grid = grid_for_profile(profile, rc.grid_n)
        rep = find_bound_states(profile, basis, tol=rc.tol, grid=grid)
        n_bs = rep.count
        skn = skn_bound_general(profile, basis, seed=rc.seed)
        gam_l1 = profile.gamma_l1()
        row_ok = n_bs <= math.floor(skn + 1e-12)
        upper = lower = -1
        if rc.profile_spec["type"] == "rectwell" and rc.sweep_axis in ("a", "none"):
            alpha1 = float(rc.profile_spec.get("alpha1", rc.alpha0 - 1.0))
            a = value if rc.sweep_axis == "a" else float(rc.profile_spec.get("a", 1.0))
            basis1 = solve_modes(rc.geometry, alpha1, rc.n_max)
            upper, lower = bracketing_bound(a, basis, basis1)
            row_ok = row_ok and (lower <= n_bs <= upper)
        chain_ok = chain_ok and row_ok
        rows.append([value, n_bs, lower, upper, skn, int(row_ok), gam_l1])
    header = [rc.sweep_axis if rc.sweep_axis != "none" else "point",
              "N_computed", "brack_lower", "brack_upper", "skn_bound",
              "chain_ok", "gamma_l1"]
    write_csv(out / "bounds.csv", header, rows)
    emit_plotdata(out / "bounds.dat", header, rows)
    checks["bound_chain_ok"] = bool(chain_ok)


def task_oracle_validate(rc: RunConfig, out: Path, checks: dict) -> None:
    basis = solve_modes(rc.geometry, rc.alpha0, rc.n_max)
    n_cmp = 6
    hy = min(rc.geometry.d1, rc.geometry.d2) / 200
    fd = transverse_fd_extrapolated(rc.geometry, rc.alpha0, hy, n_cmp)
    rows = []
    worst = 0.0
    for i in range(n_cmp):
        nu = basis.nus[i]
        rel = abs(nu - fd[i]) / max(abs(fd[i]), 1.0)
        worst = max(worst, rel)
        rows.append([i + 1, nu, fd[i], rel])
    write_csv(out / "oracle-validate.csv", ["n", "nu_module", "nu_fd", "rel_err"], rows)
    emit_plotdata(out / "oracle-validate.dat", ["n", "nu_module", "nu_fd", "rel_err"], rows)
    checks["oracle_worst_rel_err"] = worst
    checks["oracle_agreement_ok"] = bool(worst <= rc.oracle_tol)


def task_hs_scaling(rc: RunConfig, out: Path, checks: dict) -> None:
    basis = solve_modes(rc.geometry, rc.alpha0, rc.n_max)
    sigmas = rc.sweep_values if rc.sweep_axis == "sigma" else (0.4, 0.2, 0.1)
    k_sq = basis.nu1 - 1e-6
    rows = []
    for s in sigmas:
        profile = build_profile(rc, sigma=s)
        grid = grid_for_profile(profile, rc.grid_n)
        m2 = hs_norm(assemble("M", k_sq, basis, profile, grid)) ** 2
        n2 = hs_norm(assemble("N", k_sq, basis, profile, grid)) ** 2
        rows.append([s, m2, n2])
    ls = np.log([r[0] for r in rows])
    slope_m = float(np.polyfit(ls, np.log([r[1] for r in rows]), 1)[0])
    slope_n = float(np.polyfit(ls, np.log([r[2] for r in rows]), 1)[0])
    write_csv(out / "hs-scaling.csv", ["sigma", "M_hs_sq", "N_hs_sq"], rows)
    emit_plotdata(out / "hs-scaling.dat", ["sigma", "M_hs_sq", "N_hs_sq"], rows,
                  comments=[f"fitted slopes: M {slope_m:.6g}, N {slope_n:.6g}"])
    checks["hs_slope_M"] = slope_m
    checks["hs_slope_N"] = slope_n
    checks["hs_slopes_ok"] = bool(abs(slope_m - 4.0) <= 0.3 and abs(slope_n - 1.0) <= 0.2)


# -- driver -------------------------------------------------------------------

def run(rc: RunConfig, out_dir: str | Path, jobs: int = 1) -> int:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    checks: dict = {}
    for task in rc.tasks:
        if task == "modes":
            task_modes(rc, out, checks)
        elif task == "spectrum":
            task_spectrum(rc, out, checks, jobs)
        elif task == "asymptotics":
            task_asymptotics(rc, out, checks)
        elif task == "bounds":
            task_bounds(rc, out, checks)
        elif task == "oracle-validate":
            task_oracle_validate(rc, out, checks)
        elif task == "hs-scaling":
            task_hs_scaling(rc, out, checks)
    flags = [v for k, v in checks.items() if isinstance(v, bool)]
    ok = all(flags) if flags else True
    summary = {
        "version": __version__,
        "numpy": np.__version__,
        "seed": rc.seed,
        "tasks": list(rc.tasks),
        "tolerances": {"tol": rc.tol, "oracle_tol": rc.oracle_tol},
        "config": rc.raw,
        "checks": checks,
        "all_checks_passed": ok,
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="deltaguide",
                                     description="Spectral sweeps for the delta-barrier double guide")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="execute a run configuration")
    p_run.add_argument("config", help="path to the TOML run configuration")
    p_run.add_argument("--tasks", default=None,
                       help="comma-separated subset of: " + ",".join(TASKS))
    p_run.add_argument("--out", default="out", help="output directory")
    p_run.add_argument("--seed", type=int, default=None, help="RNG seed (u64)")
    p_run.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    p_run.add_argument("--validate-only", action="store_true",
                       help="validate the config and exit")
    args = parser.parse_args(argv)

    try:
        rc = load_config(args.config)
        if args.tasks is not None:
            tasks = tuple(t.strip() for t in args.tasks.split(",") if t.strip())
            if not tasks or any(t not in TASKS for t in tasks):
                raise ConfigError(f"--tasks must be a subset of {TASKS}")
            rc = RunConfig(**{**rc.__dict__, "tasks": tasks})
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("--seed must be a nonnegative integer")
            rc = RunConfig(**{**rc.__dict__, "seed": args.seed})
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.validate_only:
        print("config ok")
        return EXIT_OK
    try:
        return run(rc, args.out, jobs=max(1, args.jobs))
    except OSError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
