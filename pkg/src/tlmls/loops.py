"""Order-6 outer automorphism of sl(3, C), real form involutions and twisted loops.

``EPS = exp(i pi / 3)`` is the primitive sixth root of unity; the eigenspace
``g_j`` of the automorphism is ``{X : sigma_hat(X) = EPS**j X}``.
"""
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from .linalg import IDENTITY, P, max_norm, random_traceless

EPS = np.exp(1j * np.pi / 3)
P1 = np.diag([EPS**2, EPS**4, -1]) @ P
P1.setflags(write=False)
I21 = np.diag([1, 1, -1]).astype(complex)

UNIT_CIRCLE_PROBES = np.exp(2j * np.pi * np.arange(16) / 16)
REAL_PROBES = np.linspace(0.25, 2.0, 8)
LAMBDA_PROBES = np.concatenate([UNIT_CIRCLE_PROBES, REAL_PROBES])


def _t(X):
    return np.swapaxes(X, -1, -2)


def _monomial(M):
    """Column index and value of the single nonzero entry in each row of ``M``."""
    cols = np.argmax(np.abs(M), axis=1)
    return cols, M[np.arange(3), cols]


_P1_COLS, _P1_VALS = _monomial(P1)
_P_COLS, _P_VALS = _monomial(P)
# (M A M)[i, j] = M[i, c_i] A[c_i, k] M[k, j] with M[k, j] nonzero only for c_k = j
_P1_INV = np.argsort(_P1_COLS)
_P_INV = np.argsort(_P_COLS)


def _sandwich(A, cols, vals, inv):
    """M A M for a monomial matrix M, by permutation instead of matmul."""
    B = A[..., cols, :][..., :, inv]
    return vals[:, None] * B * vals[inv][None, :]


def sigma_hat_alg(X):
    """-P1 X^T P1 (P1 is its own inverse)."""
    return -_sandwich(_t(np.asarray(X, dtype=complex)), _P1_COLS, _P1_VALS, _P1_INV)


def sigma_hat_grp(g):
    return P1 @ np.linalg.inv(_t(np.asarray(g, dtype=complex))) @ P1


def tau_hat_alg(X):
    return -_sandwich(np.conj(_t(np.asarray(X, dtype=complex))), _P_COLS, _P_VALS, _P_INV)


def tau_hat_grp(g):
    return P @ np.linalg.inv(np.conj(_t(np.asarray(g, dtype=complex)))) @ P


class RealFormId(IntEnum):
    """The five real form involutions of the twisted loop algebra.

    Cases 1-3 are of almost compact type (lambda -> 1/conj(lambda)), cases 4-5
    of almost split type (lambda -> conj(lambda)).  Case 5 is the one realised
    by timelike minimal Lagrangian surfaces.
    """

    CP2_MINIMAL_LAGRANGIAN = 1
    DEFINITE_AFFINE_SPHERE = 2
    CH2_MINIMAL_LAGRANGIAN = 3
    INDEFINITE_AFFINE_SPHERE = 4
    TIMELIKE_CH21 = 5

    @property
    def inverts_lambda(self):
        return self <= 3


def _real_form_matrix_part(case, A):
    """Matrix part of the involution applied to an already conjugated coefficient."""
    if case == RealFormId.CP2_MINIMAL_LAGRANGIAN:
        return -_t(A)
    if case == RealFormId.DEFINITE_AFFINE_SPHERE:
        M = I21 @ P
        return M @ A @ np.linalg.inv(M)
    if case == RealFormId.CH2_MINIMAL_LAGRANGIAN:
        return -I21 @ _t(A) @ I21
    if case == RealFormId.INDEFINITE_AFFINE_SPHERE:
        return A
    return -P @ _t(A) @ P


@dataclass(frozen=True, eq=False)
class LoopMatrix:
    """Finite Laurent polynomial ``sum_k lam**k coeffs[k]`` with matrix coefficients.

    Coefficients may carry leading grid axes (shape ``(..., 3, 3)``), in which
    case evaluation returns a field of matrices.
    """

    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {int(k): np.asarray(v, dtype=complex) for k, v in self.coeffs.items()}
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def constant(cls, A):
        return cls({0: A})

    @property
    def degree(self):
        return max((abs(k) for k in self.coeffs), default=0)

    def __call__(self, lam):
        if lam == 0 and any(k < 0 for k in self.coeffs):
            raise ZeroDivisionError("loop has negative powers; cannot evaluate at 0")
        total = None
        for k in sorted(self.coeffs):
            term = complex(lam) ** k * self.coeffs[k]
            total = term if total is None else total + term
        return np.zeros((3, 3), dtype=complex) if total is None else total

    def distance(self, other):
        keys = set(self.coeffs) | set(other.coeffs)
        zero = np.zeros((3, 3), dtype=complex)
        return max(
            (max_norm(self.coeffs.get(k, zero) - other.coeffs.get(k, zero)) for k in keys),
            default=0.0,
        )


def real_form_apply(case, g):
    """Apply real form involution ``case`` (1..5) to the Laurent loop ``g``."""
    case = RealFormId(case)
    out = {}
    for k, A in g.coeffs.items():
        slot = -k if case.inverts_lambda else k
        out[slot] = _real_form_matrix_part(case, np.conj(A))
    return LoopMatrix(out)


def eigenspace_project(X, j, tol=1e-9):
    """Component of traceless ``X`` in the eigenspace g_j (j in 0..5).

    Uses the averaging projector (1/6) sum_n EPS**(-j n) sigma_hat^n(X).
    """
    X = np.asarray(X, dtype=complex)
    tr = np.abs(np.trace(X, axis1=-2, axis2=-1))
    scale = max(1.0, max_norm(X))
    if np.any(tr > tol * scale):
        raise ValueError(f"eigenspace_project expects a traceless matrix (|tr| = {np.max(tr):.3e})")
    acc = np.zeros_like(X)
    Y = X
    for n in range(6):
        acc = acc + EPS ** (-j * n % 6) * Y
        Y = sigma_hat_alg(Y)
    return acc / 6


def eigen_decompose(X, tol=1e-9):
    """All six eigencomponents of ``X`` as a list indexed by j."""
    return [eigenspace_project(X, j, tol) for j in range(6)]


def twisted_loop_check(g, tol=1e-12, level="algebra", probes=LAMBDA_PROBES):
    """Check sigma- and tau-twisting of ``g`` at the 24 probe values of lambda.

    sigma(g)(lam) = sigma_hat(g(lam / EPS)) and tau(g)(lam) = tau_hat(g(conj lam))
    must both equal g(lam).  ``level`` selects the Lie algebra (default) or
    Lie group versions of the automorphisms.
    """
    report = twist_defects(g, level=level, probes=probes)
    return report["sigma"] <= tol and report["tau"] <= tol


def twist_defects(g, level="algebra", probes=LAMBDA_PROBES):
    if level == "algebra":
        sig, tau = sigma_hat_alg, tau_hat_alg
    elif level == "group":
        sig, tau = sigma_hat_grp, tau_hat_grp
    else:
        raise ValueError(f"unknown level {level!r}")
    ds = dt = 0.0
    for lam in probes:
        value = g(lam)
        ds = max(ds, max_norm(sig(g(lam / EPS)) - value))
        dt = max(dt, max_norm(tau(g(np.conj(lam))) - value))
    return {"sigma": ds, "tau": dt}


def _power(f, X, n):
    for _ in range(n):
        X = f(X)
    return X


def relation_check(n=100, seed=0):
    """Max deviations of sigma^6 = id, tau^2 = id, sigma tau sigma = tau and
    of the eigenspace decomposition over ``n`` random traceless matrices."""
    rng = np.random.default_rng(seed)
    X = random_traceless(rng, n)
    parts = eigen_decompose(X)
    sig_eig = max(
        max_norm(sigma_hat_alg(parts[j]) - EPS**j * parts[j]) for j in range(6)
    )
    E12 = np.zeros((3, 3), dtype=complex)
    E12[0, 1] = 1
    return {
        "sigma6_identity": max_norm(_power(sigma_hat_alg, X, 6) - X),
        "tau2_identity": max_norm(tau_hat_alg(tau_hat_alg(X)) - X),
        "sigma_tau_sigma_equals_tau": max_norm(
            sigma_hat_alg(tau_hat_alg(sigma_hat_alg(X))) - tau_hat_alg(X)
        ),
        "tau_antilinear": max_norm(tau_hat_alg(1j * X) + 1j * tau_hat_alg(X)),
        "eigenprojections_sum": max_norm(sum(parts) - X),
        "eigenprojections_eigen": sig_eig,
        "sigma3_on_E12_plus_E12": max_norm(_power(sigma_hat_alg, E12, 3) + E12),
    }


def involution_checks(n=20, degree=3, seed=1):
    """Max deviation of tau(tau(g)) = g for each real form on random loops."""
    rng = np.random.default_rng(seed)
    out = {}
    for case in RealFormId:
        worst = 0.0
        for _ in range(n):
            g = LoopMatrix({k: random_traceless(rng) for k in range(-degree, degree + 1)})
            worst = max(worst, g.distance(real_form_apply(case, real_form_apply(case, g))))
        out[f"case{int(case)}_involution"] = worst
    a = 0.4
    X = np.diag([1j * a, 1j * a, -2j * a])
    out["case5_fixed_point_diag"] = LoopMatrix.constant(X).distance(
        real_form_apply(RealFormId.TIMELIKE_CH21, LoopMatrix.constant(X))
    )
    return out


def identity_loop():
    return LoopMatrix.constant(IDENTITY)
