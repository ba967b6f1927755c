"""Acceptance criteria, one test each, at their stated tolerances.

Every test prints a single ``PASS``/``FAIL`` line (shown with ``pytest -v``).
"""
import time

import numpy as np
import pytest

from conftest import clifford_field, injected_field, rp_field
from tlmls.cli import main
from tlmls.frame import (build_general_mc, build_minimal_mc, flatness_residual,
                         FLATNESS_PROBES, integrate_frame)
from tlmls.gaussmap import primitive_check
from tlmls.loops import EPS, LAMBDA_PROBES, relation_check, twist_defects
from tlmls.surface import (LiftField, closure_check_clifford, lift_from_frame, oracle_clifford,
                           oracle_rp, recover_invariants, verify_lift)
from tlmls.tzitzeica import residual, rp_omega

MARGIN = 2  # outer grid lines excluded from Q, R comparisons


@pytest.fixture
def verdict(capsys):
    def record(number, title, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {title} ({detail})")
        assert ok, f"criterion {number}: {title} ({detail})"
    return record


def mesh(field):
    return np.meshgrid(field.u, field.v, indexing="ij")


def test_criterion_01_tzitzeica_convergence(verdict):
    t0 = time.perf_counter()
    coarse = rp_field(64)
    runtime = time.perf_counter() - t0
    fine = rp_field(128)
    e1 = np.abs(coarse.omega - rp_omega(coarse.u, coarse.v)).max()
    e2 = np.abs(fine.omega - rp_omega(fine.u, fine.v)).max()
    ratio = e1 / e2
    ok = e1 <= 1e-3 and 3.5 <= ratio <= 4.5 and runtime < 1.0
    verdict(1, "Tzitzeica convergence", ok,
            f"err65={e1:.3e}, ratio={ratio:.3f}, runtime={runtime:.3f}s")


def test_criterion_02_exact_vacuum(verdict):
    field = clifford_field(128)
    res = residual(field)[1]
    ok = np.all(field.omega == 0) and res <= 1e-12
    verdict(2, "exact vacuum", ok, f"max|omega|={np.abs(field.omega).max():.1e}, residual={res:.1e}")


def test_criterion_03_frame_oracle_rp(verdict):
    t0 = time.perf_counter()
    field = rp_field(128)  # h = 1/256 on [0, 0.5]^2
    frame = integrate_frame(build_minimal_mc(field), 1.0)
    runtime = time.perf_counter() - t0
    uu, vv = mesh(field)
    err = np.abs(frame.F - oracle_rp(uu, vv, 1.0)[0]).max()
    verdict(3, "frame oracle RP", err <= 1e-6 and runtime < 5.0,
            f"max entry error={err:.3e}, runtime={runtime:.3f}s")


def test_criterion_04_frame_oracle_clifford(verdict):
    field = clifford_field(128)
    frame = integrate_frame(build_minimal_mc(field), 1.0)
    uu, vv = mesh(field)
    err = np.abs(frame.F - oracle_clifford(uu, vv, 1.0)[0]).max()
    verdict(4, "frame oracle Clifford", err <= 1e-8, f"max entry error={err:.3e}")


def _lifts():
    for name, field in (("rp", rp_field(128)), ("clifford", clifford_field(128))):
        yield name, field, lift_from_frame(integrate_frame(build_minimal_mc(field), 1.0))


def test_criterion_05_lift_identities(verdict):
    ok, parts = True, []
    for name, _, lift in _lifts():
        rep = verify_lift(lift)
        worst = max(rep[k] for k in ("fu_null", "fv_null", "im_fu_fv", "horizontal_u",
                                     "horizontal_v"))
        ok &= rep["norm"] <= 1e-6 and worst <= 1e-4 and rep["min_re_fu_fv"] > 0
        parts.append(f"{name}: norm={rep['norm']:.1e} identities={worst:.1e} "
                     f"min Re<fu,fv>={rep['min_re_fu_fv']:.3f}")
    verdict(5, "lift identities", ok, "; ".join(parts))


def test_criterion_06_invariant_recovery(verdict):
    s = slice(MARGIN, -MARGIN)
    ok, parts = True, []
    for name, field in (("rp", rp_field(64)), ("clifford", clifford_field(128))):  # h = 1/128
        lift = lift_from_frame(integrate_frame(build_minimal_mc(field), 1.0))
        inv = recover_invariants(LiftField(lift.u, lift.v, lift.f, 1.0))
        e_true = np.exp(field.omega)
        e_rel = np.max(np.abs(inv.e_omega - e_true) / e_true)
        q_err = np.abs(inv.Q[s, s] - 1j * field.q_field()[s, s]).max()
        r_err = np.abs(inv.R[s, s] - 1j * field.r_field()[s, s]).max()
        lm = max(np.abs(inv.ell).max(), np.abs(inv.m).max())
        spurious = max(inv.spurious_real_parts(MARGIN).values())
        ok &= e_rel <= 5e-4 and q_err <= 1e-2 and r_err <= 1e-2 and lm <= 1e-3 and spurious <= 1e-3
        parts.append(f"{name}: e^w rel={e_rel:.1e} Q={q_err:.1e} R={r_err:.1e} "
                     f"l,m={lm:.1e} Re={spurious:.1e}")
    verdict(6, "invariant recovery", ok, "; ".join(parts))


def test_criterion_07_twisting(verdict):
    worst = 0.0
    for field in (rp_field(32), clifford_field(32)):
        mc = build_minimal_mc(field)
        for g in (mc.U, mc.V):
            worst = max(worst, *twist_defects(g).values())
    verdict(7, "twisting at 24 probe lambdas", worst <= 1e-12, f"max defect={worst:.1e}")


def test_criterion_08_algebra_identities(verdict):
    table = relation_check(n=100)
    keys = ("sigma6_identity", "tau2_identity", "sigma_tau_sigma_equals_tau",
            "eigenprojections_sum")
    worst = max(table[k] for k in keys)
    verdict(8, "algebra identities", worst <= 1e-12, f"max deviation={worst:.1e}")


def test_criterion_09_ruh_vilms(verdict):
    field = rp_field(64)
    grid_res = residual(field)[1]
    mc = build_minimal_mc(field)
    flat_min = max(flatness_residual(mc, lam)[1] for lam in (*FLATNESS_PROBES, *LAMBDA_PROBES))
    prim_ok, _ = primitive_check(mc)
    minimal_ok = flat_min <= 5 * grid_res and prim_ok

    inj = injected_field(64)
    floor = max(5 * residual(inj)[1], 1e-6)
    gen = build_general_mc(inj, 0.1, 0.1)
    fails = flatness_residual(gen, 0.7)[1]
    holds = max(flatness_residual(gen, lam)[1] for lam in (1.0, EPS**2, EPS**4))
    inj_ok, rep = primitive_check(gen)
    injected_ok = fails >= 1e-3 and holds <= floor and not inj_ok \
        and abs(rep["offending"] - 0.1) <= 0.02
    verdict(9, "Ruh-Vilms equivalence", minimal_ok and injected_ok,
            f"minimal flatness={flat_min:.1e} (5x grid={5 * grid_res:.1e}), primitive={prim_ok}; "
            f"injected lambda=0.7: {fails:.3e}, cube roots: {holds:.1e}, "
            f"offending={rep['offending']:.4f}")


def test_criterion_10_cylinder_closure(verdict):
    c0 = closure_check_clifford(0.0, 64)
    c1 = closure_check_clifford(1.5, 64)
    control = closure_check_clifford(0.0, 64, period=np.pi)
    ok = c0 <= 1e-12 and c1 <= 1e-12 and control >= 0.5
    verdict(10, "cylinder closure", ok, f"a=0: {c0:.1e}, a=1.5: {c1:.1e}, pi control={control:.3f}")


def test_criterion_11_determinism(verdict, tmp_path, capsys):
    mismatched = []
    for name in ("rp", "clifford"):
        runs = []
        for k in (1, 2):
            out = tmp_path / f"{name}{k}"
            assert main(["example", name, "--out", str(out)]) == 0
            runs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
        if runs[0] != runs[1]:
            mismatched.append(name)
    capsys.readouterr()
    verdict(11, "determinism", not mismatched,
            f"{len(runs[0])} files per run, mismatched examples: {mismatched or 'none'}")
