"""Configuration-driven orchestration: run, sweep, verify.

A scenario is a single JSON document (versioned schema).  Runs write CSV
reports plus a manifest listing every artifact with its SHA-256 hash; given
the same config and seed the report bytes are identical.  Exit codes:
0 = all checks passed, 2 = violations recorded, 1 = execution error.
"""

from __future__ import annotations

import argparse
import copy
import csv
import hashlib
import json
import math
import os
import sys

import numpy as np

from . import estimate_lab as el
from . import heat_kernel as hk
from .errors import (
    ConfigInvalid,
    EmptyValues,
    FracRDError,
    OutputUnwritable,
    RhoInadmissible,
    UnknownAxis,
)
from .mild_solver import SolverConfig, save_checkpoint, solve_mild
from .rds_model import get_model, polynomial_model
from .spectral_core import Field, make_grid

SCHEMA_VERSION = 1
OUTPUT_ROOT_ENV = "FRACRD_OUTPUT_ROOT"

PROFILES = ("gaussian-bump", "two-bumps", "constant", "random-band-limited")


# ----------------------------------------------------------------------
# Config loading and validation
# ----------------------------------------------------------------------

def _as_float(x):
    if isinstance(x, str) and x.lower() in ("inf", "infinity"):
        return math.inf
    return float(x)


def load_config(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def validate_config(cfg: dict) -> dict:
    """Return a normalised copy of cfg; raise ConfigInvalid with one
    message per offending field."""
    msgs = []
    out = copy.deepcopy(cfg)

    if cfg.get("schema_version") != SCHEMA_VERSION:
        msgs.append(f"schema_version: expected {SCHEMA_VERSION}")

    grid = cfg.get("grid", {})
    dims = grid.get("dims")
    if dims not in (1, 2, 3):
        msgs.append(f"grid.dims: must be 1, 2, or 3, got {dims!r}")
    pts = grid.get("points", 0)
    if not (isinstance(pts, int) and pts >= 8 and pts & (pts - 1) == 0):
        msgs.append(f"grid.points: must be a power of two >= 8, got {pts!r}")
    if not (isinstance(grid.get("extent"), (int, float)) and grid["extent"] > 0):
        msgs.append("grid.extent: must be a positive real")

    model_spec = cfg.get("model")
    species = None
    if isinstance(model_spec, str):
        try:
            species = get_model(model_spec).m
        except FracRDError as e:
            msgs.append(f"model: {e}")
    elif isinstance(model_spec, dict):
        try:
            species = _inline_model(model_spec).m
        except (FracRDError, KeyError, TypeError, ValueError) as e:
            msgs.append(f"model: invalid inline definition ({e})")
    else:
        msgs.append("model: must be a registry name or inline definition")

    dvals = cfg.get("diffusivities")
    if dvals is not None:
        if species is not None and len(dvals) != species:
            msgs.append(f"diffusivities: expected {species} values")
        elif any(d <= 0 for d in dvals):
            msgs.append("diffusivities: must all be positive")

    init = cfg.get("initial_data", [])
    if species is not None and len(init) != species:
        msgs.append(f"initial_data: expected {species} profiles, got {len(init)}")
    for k, spec in enumerate(init):
        prof = spec.get("profile")
        if prof not in PROFILES:
            msgs.append(f"initial_data[{k}].profile: unknown {prof!r}")

    sol = cfg.get("solver", {})
    if not (isinstance(sol.get("dt"), (int, float)) and sol["dt"] > 0):
        msgs.append("solver.dt: must be a positive real")
    if not (isinstance(sol.get("horizon"), (int, float)) and sol["horizon"] > 0):
        msgs.append("solver.horizon: must be a positive real")
    alpha = sol.get("alpha", 0.5)
    if not (0.0 < alpha <= 1.0):
        msgs.append(f"solver.alpha: must lie in (0, 1], got {alpha!r}")

    rep = cfg.get("reports", {})
    for p in rep.get("norm_p", []):
        try:
            if _as_float(p) < 1:
                msgs.append(f"reports.norm_p: exponent {p!r} below 1")
        except (TypeError, ValueError):
            msgs.append(f"reports.norm_p: bad exponent {p!r}")
    lad = rep.get("ladder")
    if lad is not None and dims in (1, 2, 3) and 0.0 < alpha < 1.0:
        try:
            el.duality_ladder(
                dims, alpha, lad.get("rho", 1.0), lad.get("p0", 2.0),
                lad.get("eps_star", 0.0),
            )
        except RhoInadmissible as e:
            msgs.append(f"reports.ladder.rho: {e}")
        except FracRDError as e:
            msgs.append(f"reports.ladder: {e}")

    if not isinstance(cfg.get("seed", 0), int):
        msgs.append("seed: must be an integer")

    if msgs:
        raise ConfigInvalid(msgs)
    return out


def _inline_model(spec: dict):
    meta = {
        k: spec[k] for k in ("rho", "nu", "growth_c") if k in spec
    }
    if "isc_matrix" in spec:
        meta["isc_matrix"] = np.asarray(spec["isc_matrix"], dtype=float)
    return polynomial_model(
        spec["name"], spec["species"], spec["diffusivities"], spec["terms"], **meta
    )


def build_model(cfg: dict):
    spec = cfg["model"]
    model = get_model(spec) if isinstance(spec, str) else _inline_model(spec)
    if cfg.get("diffusivities"):
        model = model.with_diffusivities(cfg["diffusivities"])
    return model


# ----------------------------------------------------------------------
# Initial data profiles
# ----------------------------------------------------------------------

def _wrapped_r2(grid, center):
    coords = grid.coord_arrays()
    L = grid.extent
    r2 = np.zeros(grid.shape)
    for ax in range(grid.dims):
        d = np.abs(coords[ax] - center[ax])
        d = np.minimum(d, L - d)
        r2 += d * d
    return r2


def make_profile(grid, spec: dict, rng: np.random.Generator) -> Field:
    prof = spec["profile"]
    amp = spec.get("amplitude", 1.0)
    width = spec.get("width", grid.extent / 16.0)
    floor = spec.get("floor", 0.0)
    if prof == "constant":
        vals = np.full(grid.shape, amp)
    elif prof == "gaussian-bump":
        c = spec.get("center", [0.0] * grid.dims)
        vals = amp * np.exp(-_wrapped_r2(grid, c) / (2.0 * width**2)) + floor
    elif prof == "two-bumps":
        sep = spec.get("separation", grid.extent / 4.0)
        c1 = [-sep / 2.0] + [0.0] * (grid.dims - 1)
        c2 = [sep / 2.0] + [0.0] * (grid.dims - 1)
        vals = amp * (
            np.exp(-_wrapped_r2(grid, c1) / (2.0 * width**2))
            + np.exp(-_wrapped_r2(grid, c2) / (2.0 * width**2))
        ) + floor
    elif prof == "random-band-limited":
        modes = spec.get("modes", 8)
        coords = grid.coord_arrays()
        vals = np.zeros(grid.shape)
        base = 2.0 * np.pi / grid.extent
        for _ in range(modes):
            k = rng.integers(1, modes + 1, size=grid.dims)
            phase = rng.uniform(0.0, 2.0 * np.pi)
            coef = rng.standard_normal()
            arg = sum(base * k[ax] * coords[ax] for ax in range(grid.dims))
            vals += coef * np.cos(arg + phase)
        span = max(float(vals.max() - vals.min()), 1e-300)
        vals = amp * (vals - vals.min()) / span + floor  # nonnegative by shift
    else:
        raise ConfigInvalid([f"initial_data.profile: unknown {prof!r}"])
    return Field(grid, vals)


def random_band_limited(grid, rng, modes: int = 8) -> Field:
    """Zero-mean random trigonometric polynomial (signed, for sweeps)."""
    coords = grid.coord_arrays()
    base = 2.0 * np.pi / grid.extent
    vals = np.zeros(grid.shape)
    for _ in range(modes):
        k = rng.integers(1, modes + 1, size=grid.dims)
        phase = rng.uniform(0.0, 2.0 * np.pi)
        vals += rng.standard_normal() * np.cos(
            sum(base * k[ax] * coords[ax] for ax in range(grid.dims)) + phase
        )
    return Field(grid, vals)


# ----------------------------------------------------------------------
# Report writers
# ----------------------------------------------------------------------

def _fmt(x):
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _resolve_outdir(explicit, default_name):
    root = explicit or os.environ.get(OUTPUT_ROOT_ENV) or os.getcwd()
    path = os.path.join(root, default_name) if explicit is None else explicit
    try:
        os.makedirs(path, exist_ok=True)
        probe = os.path.join(path, ".write-probe")
        with open(probe, "w"):
            pass
        os.remove(probe)
    except OSError as e:
        raise OutputUnwritable(f"cannot write to {path}: {e}")
    return path


# ----------------------------------------------------------------------
# run
# ----------------------------------------------------------------------

def run_scenario(cfg: dict, outdir=None) -> dict:
    cfg = validate_config(cfg)
    outdir = _resolve_outdir(outdir or cfg.get("output_dir"), "fracrd-run")
    seed = cfg.get("seed", 0)
    rng = np.random.default_rng(seed)

    grid = make_grid(cfg["grid"]["dims"], float(cfg["grid"]["extent"]),
                     cfg["grid"]["points"])
    model = build_model(cfg)
    u0 = [make_profile(grid, spec, rng) for spec in cfg["initial_data"]]

    sol = cfg["solver"]
    scfg = SolverConfig(
        dt=float(sol["dt"]),
        horizon=float(sol["horizon"]),
        alpha=float(sol.get("alpha", 0.5)),
        dealias=bool(sol.get("dealias", True)),
        store_every=int(sol.get("store_every", 1)),
    )
    traj = solve_mild(model, u0, scfg)

    files = []
    violations = []

    ckpt = os.path.join(outdir, "final_state.csv")
    save_checkpoint(ckpt, grid, traj.times[-1], traj.states[-1])
    files.append(ckpt)

    rep = cfg.get("reports", {})
    norm_p = [_as_float(p) for p in rep.get("norm_p", [2.0])]
    weak_p = rep.get("weak_p")
    report = el.norm_report(
        traj, norm_p, weak_p=weak_p, alpha=scfg.alpha, d=model.d
    )
    rows = []
    for (i, p), val in sorted(report.spacetime.items()):
        rows.append([i, "inf" if math.isinf(p) else p, val])
    write_csv(os.path.join(outdir, "norms.csv"),
              ["species", "p", "spacetime_norm"], rows)
    files.append(os.path.join(outdir, "norms.csv"))
    if weak_p is not None:
        for i, (wn, p) in enumerate(zip(report.weak_norms, norm_p)):
            strong = report.spacetime.get((i, _as_float(weak_p)))
            if strong is not None and wn > strong * (1.0 + 1e-12):
                violations.append(f"weak-L{weak_p} above strong for species {i}")

    write_csv(os.path.join(outdir, "windowed_sup.csv"),
              ["window", "sup"], list(enumerate(report.windowed_sup)))
    files.append(os.path.join(outdir, "windowed_sup.csv"))

    vd = el.accumulate_v(traj, model.d)
    if not vd.b_bounds_ok:
        violations.append(
            f"b outside [{1.0 / max(model.d)}, {1.0 / min(model.d)}]: "
            f"[{vd.b_min}, {vd.b_max}]"
        )
    write_csv(os.path.join(outdir, "b_bounds.csv"),
              ["b_min", "b_max", "lower", "upper", "ok"],
              [[vd.b_min, vd.b_max, 1.0 / max(model.d), 1.0 / min(model.d),
                vd.b_bounds_ok]])
    files.append(os.path.join(outdir, "b_bounds.csv"))

    rows = []
    for gamma in rep.get("holder_gamma", []):
        sp, pa = el.holder_seminorm(vd, float(gamma), seed=seed)
        rows.append([gamma, sp, pa])
    if rows:
        write_csv(os.path.join(outdir, "holder.csv"),
                  ["gamma", "space", "parabolic"], rows)
        files.append(os.path.join(outdir, "holder.csv"))

    sv = rep.get("sv")
    if sv:
        rows = []
        for k in range(int(sv.get("fields", 20))):
            fld = random_band_limited(grid, rng)
            for ell in sv.get("ell", [2.0, 3.0, 4.0]):
                for al in sv.get("alpha", [0.3, 0.5, 0.9]):
                    gap = el.stroock_varopoulos_gap(fld, float(al), float(ell))
                    rows.append([k, ell, al, gap])
                    if gap < -1e-8 * max(abs(gap), 1.0):
                        violations.append(
                            f"SV gap {gap} at field {k}, ell={ell}, alpha={al}"
                        )
        write_csv(os.path.join(outdir, "sv.csv"),
                  ["field", "ell", "alpha", "gap"], rows)
        files.append(os.path.join(outdir, "sv.csv"))

    gn = rep.get("gn")
    if gn:
        rows = []
        ratios = []
        for k in range(int(gn.get("fields", 20))):
            fld = random_band_limited(grid, rng)
            ratio = el.gn_ratio(fld, float(gn["alpha"]), float(gn["q"]))
            ratios.append(ratio)
            rows.append([k, gn["q"], gn["alpha"], ratio])
        rows.append(["max", gn["q"], gn["alpha"], max(ratios)])
        write_csv(os.path.join(outdir, "gn.csv"),
                  ["field", "q", "alpha", "ratio"], rows)
        files.append(os.path.join(outdir, "gn.csv"))

    lad = rep.get("ladder")
    if lad:
        ladder = el.duality_ladder(
            grid.dims, scfg.alpha, float(lad.get("rho", 1.0)),
            float(lad.get("p0", 2.0)), float(lad.get("eps_star", 0.0)),
        )
        with open(os.path.join(outdir, "ladder.json"), "w") as fh:
            json.dump(
                {
                    "dims": ladder.dims,
                    "alpha": ladder.alpha,
                    "rho": ladder.rho,
                    "p0": ladder.p0,
                    "eps_star": ladder.eps_star,
                    "rho_max": ladder.rho_max,
                    "threshold": ladder.threshold,
                    "sequence": ladder.sequence,
                    "termination_index": ladder.termination_index,
                    "diverged": ladder.diverged,
                },
                fh, indent=2, sort_keys=True,
            )
        files.append(os.path.join(outdir, "ladder.json"))
        if ladder.diverged:
            violations.append("exponent ladder failed to terminate")

    for d in traj.step_diagnostics:
        sup = max(d.sup_value)
        if min(d.min_value) < -1e-8 * max(sup, 1.0):
            violations.append(f"negativity {min(d.min_value)} beyond tolerance")
            break

    manifest = {
        "schema_version": SCHEMA_VERSION,
        "seed": seed,
        "output_dir": outdir,
        "blowup_time": traj.blowup_time,
        "files": {os.path.basename(p): _sha256(p) for p in sorted(files)},
        "violations": violations,
        "passed": not violations,
    }
    with open(os.path.join(outdir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    return manifest


# ----------------------------------------------------------------------
# sweep
# ----------------------------------------------------------------------

_AXES = {
    "alpha": ("solver", "alpha"),
    "dt": ("solver", "dt"),
    "points": ("grid", "points"),
    "extent": ("grid", "extent"),
    "rho": ("reports", "ladder", "rho"),
    "p0": ("reports", "ladder", "p0"),
}


def sweep(cfg: dict, axis: str, values, outdir=None) -> list:
    """One scenario per value; returns summary rows keyed by the axis value."""
    if axis not in _AXES:
        raise UnknownAxis(f"unknown sweep axis {axis!r}; known: {sorted(_AXES)}")
    values = list(values)
    if not values:
        raise EmptyValues("sweep needs at least one value")
    outdir = _resolve_outdir(outdir or cfg.get("output_dir"), "fracrd-sweep")
    rows = []
    for v in values:
        sub = copy.deepcopy(cfg)
        node = sub
        path = _AXES[axis]
        for key in path[:-1]:
            node = node.setdefault(key, {})
        node[path[-1]] = int(v) if axis == "points" else float(v)
        sub.pop("output_dir", None)
        man = run_scenario(sub, outdir=os.path.join(outdir, f"{axis}={v}"))
        rows.append([v, man["passed"], len(man["violations"]),
                     man["blowup_time"] if man["blowup_time"] is not None else ""])
    write_csv(os.path.join(outdir, "sweep.csv"),
              [axis, "passed", "violations", "blowup_time"], rows)
    return rows


# ----------------------------------------------------------------------
# verify suites
# ----------------------------------------------------------------------

def _suite_kernel(outdir, seed):
    rows, bad = [], []
    g = make_grid(1, 200.0, 1024)
    for alpha, exact in ((0.5, 1.0 / np.pi), (1.0, (4.0 * np.pi) ** -0.5)):
        spec = hk.KernelSpec(alpha, 1.0, g)
        peak = float(hk.heat_kernel_field(spec, 1.0).values[0])
        err = abs(peak - exact) / exact
        rows.append(["peak", alpha, peak, exact, err])
        if err > 1e-4:
            bad.append(f"kernel peak alpha={alpha} off by {err:.3g}")
    spec = hk.KernelSpec(0.5, 1.0, g)
    diag = hk.kernel_diagnostics(spec, [0.1, 0.2, 0.4])
    rows.append(["selfsim", 0.5, diag["self_similarity_residual"], 0.0, ""])
    if diag["self_similarity_residual"] > 1e-10:
        bad.append("self-similarity residual above 1e-10")
    fits = [
        (1, 0.5, 1.0, math.inf, 0.0, make_grid(1, 200.0, 1024)),
        (1, 0.75, 1.0, 2.0, 0.0, make_grid(1, 200.0, 1024)),
        (1, 0.5, 1.0, math.inf, 0.25, make_grid(1, 200.0, 1024)),
    ]
    for dims, alpha, r, p, beta, gg in fits:
        spec = hk.KernelSpec(alpha, 1.0, gg)
        times = np.geomspace(0.05, 20.0, 24)
        repf = hk.smoothing_rate_fit(spec, r, p, times, beta=beta)
        rows.append([f"slope b={beta}", alpha, repf.fitted_slope,
                     repf.predicted_slope, repf.relative_error])
        if repf.relative_error > 0.05:
            bad.append(f"smoothing slope off by {repf.relative_error:.3g}")
    write_csv(os.path.join(outdir, "kernel.csv"),
              ["check", "alpha", "value", "expected", "error"], rows)
    return ["kernel.csv"], bad


def _suite_inequalities(outdir, seed):
    rows, bad = [], []
    rng = np.random.default_rng(seed)
    g = make_grid(1, 2.0 * np.pi, 128)
    for k in range(100):
        fld = random_band_limited(g, rng)
        for ell in (2.0, 3.0, 4.0):
            for al in (0.3, 0.5, 0.9):
                gap = el.stroock_varopoulos_gap(fld, al, ell)
                rows.append(["sv", k, ell, al, gap])
                if gap < -1e-8 * max(abs(gap), 1.0):
                    bad.append(f"SV gap {gap} (field {k}, ell={ell}, a={al})")
    ratios = []
    for k in range(100):
        fld = random_band_limited(g, rng)
        ratios.append(el.gn_ratio(fld, 0.5, 4.0))
        rows.append(["gn", k, 4.0, 0.5, ratios[-1]])
    rows.append(["gn-max", "", 4.0, 0.5, max(ratios)])
    times = np.linspace(0.0, 4.0, 801)
    for mu in (0.5, 1.0, 2.0):
        for k in range(50):
            fld = random_band_limited(g, rng)
            ftraj = np.exp(-times)[:, None] * fld.values[None, :]
            ratio = el.maximal_reg_ratio(ftraj, times, 0.5, mu, g)
            rows.append(["maxreg", k, mu, 0.5, ratio])
            if ratio > 1.05 / mu:
                bad.append(f"maximal regularity ratio {ratio} > 1.05/{mu}")
    write_csv(os.path.join(outdir, "inequalities.csv"),
              ["check", "field", "param", "alpha", "value"], rows)
    return ["inequalities.csv"], bad


def _suite_ladder(outdir, seed):
    rows, bad = [], []
    lad = el.duality_ladder(2, 0.75, 1.0, 2.0)
    rows.append(["worked-1", lad.sequence, lad.termination_index])
    if lad.termination_index != 1 or abs(lad.sequence[1] - 14.0) > 1e-12:
        bad.append("ladder (N=2, a=0.75, rho=1, p0=2) mismatch")
    lad = el.duality_ladder(3, 0.5, 1.2, 2.1)
    rows.append(["worked-2", lad.sequence, lad.termination_index])
    if lad.termination_index != 2:
        bad.append("ladder (N=3, a=0.5, rho=1.2, p0=2.1) mismatch")
    rng = np.random.default_rng(seed)
    for k in range(200):
        dims = int(rng.integers(1, 4))
        alpha = float(rng.uniform(0.1, 0.99))
        rho = float(rng.uniform(
            1.0, min(1.0 + 4.0 * alpha / (dims + 2.0 * alpha), 2.0)
        ))
        p0 = float(rng.uniform(2.0 + 1e-6, 4.0))
        lad = el.duality_ladder(dims, alpha, rho, p0)
        seq = lad.sequence
        mono = all(b > a for a, b in zip(seq, seq[1:]))
        rows.append([f"sweep-{k}", seq[-1], lad.termination_index])
        if not mono:
            bad.append(f"non-monotone ladder at sweep {k}")
    try:
        el.duality_ladder(2, 0.5, 2.5, 3.0)
        bad.append("rho=2.5 not rejected")
    except RhoInadmissible:
        rows.append(["rho-reject", 2.5, "ok"])
    write_csv(os.path.join(outdir, "ladder.csv"),
              ["check", "value", "termination"], rows)
    return ["ladder.csv"], bad


def _suite_bimolecular(outdir, seed):
    rows, bad = [], []
    g = make_grid(1, 10.0, 8)
    model = get_model("bimolecular")
    u0 = [Field(g, np.full(g.shape, c)) for c in (1.0, 0.0, 1.0, 0.0)]
    cfg = SolverConfig(dt=1e-3, horizon=1.0, alpha=0.5, store_every=100)
    traj = solve_mild(model, u0, cfg)
    u1 = float(traj.states[-1][0][0])
    exact = 0.5 * (1.0 + math.exp(-2.0))  # du1/dt = -(2 u1 - 1), u1(0) = 1
    rows.append(["ode-u1", u1, exact, abs(u1 - exact)])
    if abs(u1 - exact) > 1e-6:
        bad.append(f"ODE reduction error {abs(u1 - exact):.3g}")
    mass0 = sum(traj.step_diagnostics[0].total_mass)
    for t, d in zip(traj.step_times, traj.step_diagnostics):
        if abs(sum(d.total_mass) - mass0) > 1e-10 * mass0 * max(t, 1.0):
            bad.append(f"mass drift at t={t}")
            break
    rows.append(["mass", sum(traj.step_diagnostics[-1].total_mass), mass0, ""])
    vd = el.accumulate_v(traj, model.d)
    rows.append(["b-bounds", vd.b_min, vd.b_max, vd.b_bounds_ok])
    if not vd.b_bounds_ok:
        bad.append("b-coefficient outside bounds")
    write_csv(os.path.join(outdir, "bimolecular.csv"),
              ["check", "value", "reference", "extra"], rows)
    return ["bimolecular.csv"], bad


SUITES = {
    "kernel": _suite_kernel,
    "inequalities": _suite_inequalities,
    "ladder": _suite_ladder,
    "bimolecular": _suite_bimolecular,
}


def run_verify(names, outdir=None, seed: int = 0) -> dict:
    outdir = _resolve_outdir(outdir, "fracrd-verify")
    files, violations = [], []
    for name in names:
        if name not in SUITES:
            raise ConfigInvalid([f"unknown suite {name!r}; known: {sorted(SUITES)}"])
        written, bad = SUITES[name](outdir, seed)
        files.extend(os.path.join(outdir, w) for w in written)
        violations.extend(f"{name}: {b}" for b in bad)
    manifest = {
        "suites": list(names),
        "seed": seed,
        "files": {os.path.basename(p): _sha256(p) for p in sorted(files)},
        "violations": violations,
        "passed": not violations,
    }
    with open(os.path.join(outdir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    return manifest


# ----------------------------------------------------------------------
# entry point
# ----------------------------------------------------------------------

def main(argv=None) -> int:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--out", default=None)
    common.add_argument("--threads", type=int, default=None, help="reserved")

    ap = argparse.ArgumentParser(prog="fracrd")
    sub = ap.add_subparsers(dest="verb", required=True)

    p_run = sub.add_parser("run", parents=[common])
    p_run.add_argument("config")

    p_sweep = sub.add_parser("sweep", parents=[common])
    p_sweep.add_argument("config")
    p_sweep.add_argument("--axis", required=True)
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated numeric list")

    p_ver = sub.add_parser("verify", parents=[common])
    p_ver.add_argument("suite", nargs="+", choices=sorted(SUITES))

    args = ap.parse_args(argv)
    try:
        if args.verb == "run":
            cfg = load_config(args.config)
            if args.seed is not None:
                cfg["seed"] = args.seed
            man = run_scenario(cfg, outdir=args.out)
        elif args.verb == "sweep":
            cfg = load_config(args.config)
            if args.seed is not None:
                cfg["seed"] = args.seed
            values = [float(v) for v in args.values.split(",") if v]
            rows = sweep(cfg, args.axis, values, outdir=args.out)
            man = {"passed": all(r[1] for r in rows)}
        else:
            man = run_verify(args.suite, outdir=args.out,
                             seed=args.seed if args.seed is not None else 0)
        if not man["passed"]:
            print("violations recorded", file=sys.stderr)
            return 2
        return 0
    except FracRDError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
