import numpy as np
import pytest
from hypothesis import given, strategies as st

from tlmls.linalg import IDENTITY, mat_exp, random_traceless
from tlmls.loops import (EPS, LAMBDA_PROBES, LoopMatrix, P1, RealFormId, eigen_decompose,
                         eigenspace_project, identity_loop, involution_checks, real_form_apply,
                         relation_check, sigma_hat_alg, sigma_hat_grp, tau_hat_alg, tau_hat_grp,
                         twist_defects, twisted_loop_check)
from tlmls.surface import U_VAC, V_VAC


def E(i, j):
    m = np.zeros((3, 3), dtype=complex)
    m[i - 1, j - 1] = 1
    return m


seeds = st.integers(0, 2**32 - 1)


def test_p1_is_involution():
    assert np.abs(P1 @ P1 - IDENTITY).max() < 1e-15


def test_sigma_hat_alg_examples():
    h0 = np.diag([1, -1, 0])
    h3 = np.diag([1, 1, -2])
    assert np.abs(sigma_hat_alg(h0) - h0).max() < 1e-15
    assert np.abs(sigma_hat_alg(E(1, 2)) - EPS * E(1, 2)).max() < 1e-15
    assert np.abs(sigma_hat_alg(h3) + h3).max() < 1e-15


@pytest.mark.parametrize("j, X", [
    (0, np.diag([0.3, -0.3, 0])),
    (1, E(2, 3) + E(3, 1)),
    (2, E(1, 3) - E(3, 2)),
    (3, np.diag([0.5, 0.5, -1.0])),
    (4, E(2, 3) - E(3, 1)),
    (5, E(1, 3) + E(3, 2)),
    (5, E(2, 1)),
])
def test_eigenspace_table(j, X):
    assert np.abs(sigma_hat_alg(X) - EPS**j * X).max() < 1e-14
    assert np.abs(eigenspace_project(X, j) - X).max() < 1e-14


def test_sigma_hat_grp_examples():
    assert np.abs(sigma_hat_grp(IDENTITY) - IDENTITY).max() < 1e-15
    rng = np.random.default_rng(3)
    for _ in range(10):
        g = mat_exp(random_traceless(rng))
        h = g
        for _ in range(6):
            h = sigma_hat_grp(h)
        assert np.abs(h - g).max() <= 1e-12 * np.abs(g).max()
        X = 0.3 * random_traceless(rng)
        assert np.abs(sigma_hat_grp(mat_exp(X)) - mat_exp(sigma_hat_alg(X))).max() < 1e-10


def test_tau_hat_examples():
    assert np.abs(tau_hat_grp(IDENTITY) - IDENTITY).max() < 1e-15
    a = 0.4
    X = np.diag([1j * a, 1j * a, -2j * a])
    assert np.abs(tau_hat_alg(X) - X).max() < 1e-15


@given(seeds)
def test_tau_hat_involution_and_antilinear(seed):
    X = random_traceless(np.random.default_rng(seed))
    assert np.abs(tau_hat_alg(tau_hat_alg(X)) - X).max() <= 1e-14
    assert np.abs(tau_hat_alg(1j * X) + 1j * tau_hat_alg(X)).max() <= 1e-14


def test_real_form_examples():
    X = np.diag([0.4j, 0.4j, -0.8j])
    assert LoopMatrix.constant(X).distance(real_form_apply(5, LoopMatrix.constant(X))) < 1e-15
    rng = np.random.default_rng(0)
    real = LoopMatrix({k: rng.normal(size=(3, 3)) for k in (-2, 0, 1)})
    assert real.distance(real_form_apply(RealFormId.INDEFINITE_AFFINE_SPHERE, real)) == 0


def test_real_form_slot_handling():
    g = LoopMatrix({1: random_traceless(np.random.default_rng(1))})
    assert set(real_form_apply(1, g).coeffs) == {-1}
    assert set(real_form_apply(5, g).coeffs) == {1}
    assert RealFormId(2).inverts_lambda and not RealFormId(4).inverts_lambda


@given(seeds, st.sampled_from(list(RealFormId)))
def test_real_forms_are_involutions(seed, case):
    rng = np.random.default_rng(seed)
    g = LoopMatrix({k: random_traceless(rng) for k in range(-3, 4)})
    assert g.distance(real_form_apply(case, real_form_apply(case, g))) <= 1e-13


def test_eigenspace_project_examples():
    h0 = np.diag([1, -1, 0]).astype(complex)
    assert np.abs(eigenspace_project(h0, 0) - h0).max() < 1e-14
    for j in range(1, 6):
        assert np.abs(eigenspace_project(h0, j)).max() < 1e-14
    assert np.abs(eigenspace_project(E(1, 2), 1) - E(1, 2)).max() < 1e-14
    h3 = np.diag([1, 1, -2]).astype(complex)
    assert np.abs(eigenspace_project(h3, 3) - h3).max() < 1e-14


def test_eigenspace_project_rejects_trace():
    with pytest.raises(ValueError):
        eigenspace_project(IDENTITY, 0)


@given(seeds)
def test_eigen_decomposition_properties(seed):
    X = random_traceless(np.random.default_rng(seed))
    parts = eigen_decompose(X)
    assert np.abs(sum(parts) - X).max() <= 1e-13
    for j, Xj in enumerate(parts):
        assert np.abs(eigenspace_project(Xj, j) - Xj).max() <= 1e-13
        for k in range(6):
            if k != j:
                assert np.abs(eigenspace_project(Xj, k)).max() <= 1e-13
        # tau preserves every eigenspace
        T = tau_hat_alg(Xj)
        assert np.abs(eigenspace_project(T, j) - T).max() <= 1e-13


def test_g0_is_the_diagonal_line():
    rng = np.random.default_rng(7)
    for X in random_traceless(rng, 20):
        Y = eigenspace_project(X, 0)
        assert np.abs(Y - np.diag(np.diag(Y))).max() < 1e-14
        assert abs(Y[0, 0] + Y[1, 1]) < 1e-14 and abs(Y[2, 2]) < 1e-14


def test_twisted_loop_examples():
    assert twisted_loop_check(identity_loop(), level="group")
    assert twisted_loop_check(LoopMatrix({-1: U_VAC, 1: V_VAC}))
    assert twisted_loop_check(LoopMatrix({-1: U_VAC})) and twisted_loop_check(LoopMatrix({1: V_VAC}))
    assert not twisted_loop_check(LoopMatrix({1: E(1, 3)}))
    assert len(LAMBDA_PROBES) == 24


def test_twist_defects_level_validation():
    with pytest.raises(ValueError):
        twist_defects(identity_loop(), level="sheaf")


def test_loop_evaluation():
    g = LoopMatrix({-1: E(1, 3), 2: E(2, 1)})
    assert g.degree == 2
    assert np.abs(g(2.0) - (0.5 * E(1, 3) + 4 * E(2, 1))).max() == 0
    with pytest.raises(ZeroDivisionError):
        g(0)


def test_relation_check_report():
    report = relation_check(n=100)
    assert report.keys() >= {"sigma6_identity", "tau2_identity", "sigma_tau_sigma_equals_tau",
                             "tau_antilinear", "sigma3_on_E12_plus_E12"}
    assert max(report.values()) <= 1e-12
    # sigma^3 is not the identity: on E12 it acts as -1
    X = E(1, 2)
    for _ in range(3):
        X = sigma_hat_alg(X)
    assert np.abs(X - E(1, 2)).max() > 1.9


def test_involution_checks_report():
    report = involution_checks()
    assert len(report) == 6 and max(report.values()) <= 1e-12
