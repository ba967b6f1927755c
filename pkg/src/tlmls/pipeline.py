"""Solve, build, verify and example pipelines behind the command line."""
import csv
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .config import ConfigError, parse_config, preset
from .formats import read_frame_csv, read_lift_csv, write_frame_csv, write_lift_csv
from .frame import (FLATNESS_PROBES, build_general_mc, build_minimal_mc, flatness_residual,
                    frame_drift, integrate_frame)
from .gaussmap import primitive_check
from .loops import involution_checks, relation_check, twist_defects
from .surface import (F0, LiftField, clifford_f0, closure_check_clifford, export_surface,
                      lift_from_frame, oracle_clifford, oracle_rp, recover_invariants,
                      verify_lift)
from .tzitzeica import SolutionField, compatibility_check_general, residual, rp_omega, solve_goursat

OMEGA_HEADER = ["u", "v", "omega"]
STENCIL_MARGIN = 2


class InputError(Exception):
    """Missing or unreadable artifacts (exit code 2)."""


def workers():
    raw = os.environ.get("TLMLS_THREADS")
    if raw is None:
        return min(4, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"TLMLS_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError("TLMLS_THREADS must be a positive integer")
    return n


def lambda_tag(lam):
    re, im = round(complex(lam).real, 12) + 0.0, round(complex(lam).imag, 12) + 0.0
    if im == 0:
        return f"{re:.12g}"
    return f"{re:.12g}{im:+.12g}j"


def write_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _check(value, tol, passed=None):
    passed = value <= tol if passed is None else passed
    return {"max_residual": float(value), "tolerance": float(tol), "pass": bool(passed)}


def solve(cfg):
    """Solve the Goursat problem; returns (field, grid residual, runtime in seconds)."""
    data = cfg.goursat_data()
    t0 = time.perf_counter()
    field = solve_goursat(data)
    runtime = time.perf_counter() - t0
    return field, residual(field)[1], runtime


def cmd_solve(cfg, out, timing=True):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    field, res, runtime = solve(cfg)
    _write_omega_csv(out / "omega.csv", field)
    report = {"residual": res, "grid": {"Nu": cfg.grid[0], "Nv": cfg.grid[1]},
              "domain": cfg.to_json()["domain"]}
    if timing:
        report["runtime_s"] = runtime
    write_json(out / "solve_report.json", report)
    write_json(out / "config.json", cfg.to_json())
    return field, report


def _write_omega_csv(path, field):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(OMEGA_HEADER)
        for i, u in enumerate(field.u):
            for j, v in enumerate(field.v):
                w.writerow(["%.17g" % u, "%.17g" % v, "%.17g" % field.omega[i, j]])


def read_omega(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if rows[0] != OMEGA_HEADER:
        raise InputError(f"{path}: unexpected header {rows[0]}")
    body = np.array(rows[1:], dtype=float)
    u, v = np.unique(body[:, 0]), np.unique(body[:, 1])
    return u, v, body[:, 2].reshape(u.size, v.size)


def make_mc(cfg, field):
    if cfg.minimal:
        return build_minimal_mc(field)
    return build_general_mc(field, cfg.ell_im, cfg.m_im, tol=cfg.tolerances["compatibility"])


def _build_one(mc, lam, out, obj):
    frame = integrate_frame(mc, lam)
    tag = lambda_tag(lam)
    write_frame_csv(out / f"frame_{tag}.csv", frame.u, frame.v, frame.F)
    lift = lift_from_frame(frame)
    export_surface(lift, out, stem=f"surface_{tag}", obj=obj)
    return frame, {"lambda": [lam.real, lam.imag], "max_drift": frame.max_drift}


def cmd_build(cfg, out, lambdas=None, obj=False, field=None):
    """Integrate the frame for every lambda and export frames and surfaces."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    lambdas = tuple(cfg.lambdas if lambdas is None else lambdas)
    if any(lam == 0 for lam in lambdas):
        raise ConfigError("lambda must be nonzero")
    if field is None:
        field, _ = cmd_solve(cfg, out, timing=False)
    cfg = parse_config({**cfg.to_json(), "lambdas": [[l.real, l.imag] for l in lambdas]})
    write_json(out / "config.json", cfg.to_json())
    mc = make_mc(cfg, field)
    with ThreadPoolExecutor(max_workers=workers()) as pool:
        results = list(pool.map(lambda lam: _build_one(mc, complex(lam), out, obj), lambdas))
    frames = [r[0] for r in results]
    write_json(out / "build_report.json", {"frames": [r[1] for r in results]})
    return field, frames


def _load_field(cfg, out):
    path = out / "omega.csv"
    if not path.exists():
        raise InputError(f"missing {path}")
    u, v, omega = read_omega(path)
    data = cfg.goursat_data()
    if u.size != data.u.size or v.size != data.v.size:
        raise InputError("omega.csv does not match the configured grid")
    return SolutionField(u, v, omega, data.q, data.r, cfg.ell_im, cfg.m_im)


def verify_dir(out, tol_overrides=None):
    """Recompute every check from the artifacts in ``out``; returns the report."""
    out = Path(out)
    cfg_path = out / "config.json"
    if not cfg_path.exists():
        raise InputError(f"missing {cfg_path}")
    raw = json.loads(cfg_path.read_text())
    raw["tolerances"] = {**raw.get("tolerances", {}), **(tol_overrides or {})}
    cfg = parse_config(raw)
    tol = cfg.tolerances
    field = _load_field(cfg, out)
    checks = {}

    grid_res = residual(field)[1]
    checks["tzitzeica_residual"] = _check(grid_res, tol["tzitzeica"])
    comp = compatibility_check_general(field.omega, field.q_field(), field.r_field(),
                                       cfg.ell_im, cfg.m_im, field.h_u, field.h_v)
    checks["compatibility"] = _check(
        max(comp["closedness"], comp["codazzi_q"], comp["codazzi_r"]), tol["compatibility"])

    mc = make_mc(cfg, field)
    tw = [twist_defects(g) for g in (mc.U, mc.V)]
    checks["twisting"] = _check(max(max(d.values()) for d in tw), tol["twisting"])
    flat_tol = max(tol["flatness_factor"] * grid_res, tol["flatness_floor"])
    for lam in FLATNESS_PROBES:
        checks[f"flatness_lambda={lambda_tag(lam)}"] = _check(
            flatness_residual(mc, lam)[1], flat_tol)
    ok, prim = primitive_check(mc, tol["primitive"])
    checks["primitive"] = _check(prim["offending"], prim["tolerance"], ok)

    for lam in cfg.lambdas:
        _verify_lambda(cfg, field, out, complex(lam), checks)

    overall = all(c["pass"] for c in checks.values())
    report = {"checks": checks, "overall": bool(overall), "primitive": prim}
    write_json(out / "report.json", report)
    return report


def _verify_lambda(cfg, field, out, lam, checks):
    tol = cfg.tolerances
    tag = lambda_tag(lam)
    paths = {k: out / f"{k}_{tag}.csv" for k in ("frame", "surface")}
    for p in paths.values():
        if not p.exists():
            raise InputError(f"missing {p}")
    _, _, F = read_frame_csv(paths["frame"])
    drift = frame_drift(F, lam)
    checks[f"drift_lambda={tag}"] = _check(float(drift.max()), tol["drift"])
    if lam.imag != 0:
        return
    u, v, f = read_lift_csv(paths["surface"])
    lam = lam.real
    lift = LiftField(u, v, f, lam)
    rep = verify_lift(lift)
    checks[f"lift_norm_lambda={tag}"] = _check(rep["norm"], tol["lift_norm"])
    for key in ("fu_null", "fv_null", "im_fu_fv", "horizontal_u", "horizontal_v"):
        checks[f"lift_{key}_lambda={tag}"] = _check(rep[key], tol["lift_identity"])
    checks[f"immersion_lambda={tag}"] = {
        "max_residual": rep["min_re_fu_fv"], "tolerance": 0.0, "comparison": ">",
        "pass": not rep["degenerate"],
    }
    if rep["degenerate"]:
        return
    inv = recover_invariants(lift)
    e_true = np.exp(field.omega)
    checks[f"e_omega_lambda={tag}"] = _check(
        float(np.max(np.abs(inv.e_omega - e_true) / e_true)), tol["e_omega_rel"])
    s = slice(STENCIL_MARGIN, -STENCIL_MARGIN)
    Q = lam**-3 * 1j * field.q_field()
    R = lam**3 * 1j * field.r_field()
    checks[f"Q_lambda={tag}"] = _check(float(np.max(np.abs(inv.Q[s, s] - Q[s, s]))), tol["cubic"])
    checks[f"R_lambda={tag}"] = _check(float(np.max(np.abs(inv.R[s, s] - R[s, s]))), tol["cubic"])
    if cfg.minimal or lam == 1:
        dl = np.max(np.abs(inv.ell - 1j * cfg.ell_im))
        dm = np.max(np.abs(inv.m - 1j * cfg.m_im))
        checks[f"mean_curvature_lambda={tag}"] = _check(float(max(dl, dm)), tol["mean_curvature"])
    spurious = inv.spurious_real_parts(STENCIL_MARGIN)
    checks[f"real_parts_lambda={tag}"] = _check(max(spurious.values()), tol["real_parts"])


def cmd_classify_realform():
    table = {**relation_check(), **involution_checks()}
    return {"max_deviation": table, "tolerance": 1e-12,
            "pass": bool(all(v <= 1e-12 for v in table.values()))}


def cmd_example(name, out, n=None):
    """Full pipeline for a named example plus the closed-form oracle side by side."""
    cfg = preset(name, n)
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    field, _ = cmd_solve(cfg, out, timing=False)
    _, frames = cmd_build(cfg, out, field=field)
    frame = frames[0]
    uu, vv = np.meshgrid(field.u, field.v, indexing="ij")
    oracle = oracle_rp if name == "rp" else oracle_clifford
    F_or, f_or = oracle(uu, vv, 1.0)
    write_frame_csv(out / "oracle_frame_1.csv", field.u, field.v, F_or)
    write_lift_csv(out / "oracle_surface_1.csv", field.u, field.v, f_or)
    tol = cfg.tolerances
    diff = {
        "frame_max_error": float(np.max(np.abs(frame.F - F_or))),
        "lift_max_error": float(np.max(np.abs(frame.F[..., :, 2] - f_or))),
    }
    limits = {"frame_max_error": tol["oracle"], "lift_max_error": tol["oracle"]}
    if name == "rp":
        diff["omega_max_error"] = float(np.max(np.abs(field.omega - rp_omega(field.u, field.v))))
        limits["omega_max_error"] = tol["tzitzeica"]
    else:
        f0 = np.einsum("ij,abj->abi", F0, clifford_f0(uu, vv))
        diff["lift_vs_F0f0"] = float(np.max(np.abs(frame.F[..., :, 2] - f0)))
        limits["lift_vs_F0f0"] = tol["oracle"]
        for a in (0.0, 1.5):
            diff[f"closure_a={a:g}"] = closure_check_clifford(a, 64)
            limits[f"closure_a={a:g}"] = tol["closure"]
        diff["closure_pi_shift_control"] = closure_check_clifford(0.0, 64, period=np.pi)
    passed = all(diff[k] <= v for k, v in limits.items())
    if name == "clifford":
        passed = passed and diff["closure_pi_shift_control"] >= 0.5
    write_json(out / "diff.json", {"max_deviation": diff, "limits": limits, "pass": bool(passed)})
    report = verify_dir(out)
    return bool(passed and report["overall"]), diff, report
