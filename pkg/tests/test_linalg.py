import numpy as np
import pytest
from hypothesis import given, strategies as st

from tlmls.linalg import (IDENTITY, P, NotInGroupError, herm_form, is_su21, is_u21, mat_exp,
                          metric_g, random_su21_algebra, symplectic_omega, u21_inverse)
from tlmls.surface import F0, N_PLUS, clifford_f0

E = np.eye(3, dtype=complex)

finite = st.floats(-3, 3, allow_nan=False)
vec = st.lists(finite, min_size=6, max_size=6).map(lambda x: np.array(x[:3]) + 1j * np.array(x[3:]))


def test_p_squares_to_identity():
    assert np.array_equal(P @ P, IDENTITY)
    assert np.array_equal(P.T, P)


def test_herm_form_basis():
    assert herm_form(E[0], E[1]) == 1
    assert herm_form(E[2], E[2]) == -1


def test_herm_form_clifford_lift_is_unit_negative():
    z = clifford_f0(0.3, -0.1)
    assert abs(herm_form(z, z) + 1) < 1e-14


def test_metric_and_symplectic_parts():
    assert metric_g(E[0], E[1]) == 1 and symplectic_omega(E[0], E[1]) == 0
    assert metric_g(E[0], 1j * E[1]) == 0
    assert symplectic_omega(E[0], 1j * E[1]) == -1


@given(vec, vec)
def test_herm_form_conjugate_symmetric(z, w):
    assert abs(herm_form(z, w) - np.conj(herm_form(w, z))) <= 1e-14 * (1 + np.abs(z).max() * np.abs(w).max())
    assert abs(symplectic_omega(z, z)) <= 1e-14 * (1 + np.abs(z).max() ** 2)


def test_is_u21_examples():
    assert is_u21(IDENTITY)
    assert is_u21(F0)
    assert not is_u21(np.diag([2, 1, 1]))
    with pytest.raises(ValueError):
        is_u21(IDENTITY, tol=0)


def test_is_su21_examples():
    t = 0.4
    assert is_su21(IDENTITY)
    assert is_su21(np.diag(np.exp([1j * t, 1j * t, -2j * t])))
    assert not is_su21(np.exp(1j * np.pi / 5) * IDENTITY)


def test_mat_exp_examples():
    assert np.array_equal(mat_exp(np.zeros((3, 3))), IDENTITY)
    a = 0.7
    np.testing.assert_allclose(mat_exp(np.diag([a, -a, 0])), np.diag([np.exp(a), np.exp(-a), 1]),
                               rtol=1e-14)
    E12 = np.zeros((3, 3))
    E12[0, 1] = 1
    t = 0.5
    assert np.array_equal(N_PLUS @ N_PLUS, E12)
    assert not np.any(N_PLUS @ N_PLUS @ N_PLUS)
    assert np.abs(mat_exp(t * N_PLUS) - (IDENTITY + t * N_PLUS + t**2 / 2 * E12)).max() < 1e-15


def test_mat_exp_rejects_nonfinite():
    with pytest.raises(ValueError):
        mat_exp(np.full((3, 3), np.nan))


def _scaled(seed, size):
    rng = np.random.default_rng(seed)
    X = rng.uniform(-1, 1, (3, 3)) + 1j * rng.uniform(-1, 1, (3, 3))
    return X * size / np.abs(X).max()


@given(st.integers(0, 2**32 - 1), st.floats(0.01, 1.0))
def test_mat_exp_inverse_pair_absolute(seed, size):
    X = _scaled(seed, size)
    assert np.abs(mat_exp(X) @ mat_exp(-X) - IDENTITY).max() <= 1e-12


@given(st.integers(0, 2**32 - 1), st.floats(0.01, 5.0))
def test_mat_exp_inverse_pair_relative(seed, size):
    # rounding the product alone costs about eps * |A| |B|, which exceeds
    # 1e-12 in absolute terms once |X| approaches 5
    X = _scaled(seed, size)
    A, B = mat_exp(X), mat_exp(-X)
    cond = max(1.0, np.abs(A).max() * np.abs(B).max())
    assert np.abs(A @ B - IDENTITY).max() <= 1e-12 * cond


def test_u21_inverse():
    assert np.array_equal(u21_inverse(IDENTITY), IDENTITY)
    assert np.abs(F0 @ u21_inverse(F0) - IDENTITY).max() < 1e-14
    with pytest.raises(NotInGroupError):
        u21_inverse(np.diag([2, 1, 1]))


@given(st.integers(0, 2**32 - 1))
def test_group_closure_and_form_invariance(seed):
    rng = np.random.default_rng(seed)
    M, N = mat_exp(random_su21_algebra(rng, 2))
    z, w = rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3))
    assert is_u21(M @ N, 1e-12)
    scale = 1 + np.abs(M).max() ** 2 * np.abs(z).max() * np.abs(w).max()
    assert abs(herm_form(M @ z, M @ w) - herm_form(z, w)) <= 1e-12 * scale
    assert np.abs(M @ u21_inverse(M) - IDENTITY).max() <= 10 * 1e-9
