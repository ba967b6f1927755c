"""Normalized frame, the Gauss map g3 and the Lorentz primitive harmonicity test."""
from dataclasses import dataclass

import numpy as np

from .frame import MCForm, compute_L_integral
from .linalg import random_traceless
from .loops import P1, eigen_decompose, eigenspace_project, sigma_hat_alg, sigma_hat_grp, tau_hat_alg

PRIMITIVE_TOL = 1e-6
U_SLOT = 5  # the du part of alpha_p must lie in g_5
V_SLOT = 1  # the dv part of alpha_p must lie in g_1


@dataclass(frozen=True, eq=False)
class NormalizedFrame:
    u: np.ndarray
    v: np.ndarray
    F: np.ndarray
    L_im: np.ndarray
    det_scale: complex

    @property
    def det_defect(self):
        return float(np.max(np.abs(np.linalg.det(self.F) - 1)))


def normalized_frame(frame, ell_im, m_im, tol=1e-6):
    """F D with D = diag(e^{-L}, e^{-L}, 1), L = i L_im the primitive of l du + m dv.

    If det(F D) differs from 1 (it is constant), the frame is further
    right-multiplied by diag(a^{-1/2}, a^{-1/2}, 1), a = det(F D) at the
    basepoint; this keeps the last column, i.e. the lift.
    """
    L = compute_L_integral(ell_im, m_im, frame.u, frame.v, tol)
    ph = np.exp(-1j * L.L_im)
    F = np.array(frame.F, dtype=complex)
    F[..., :, :2] *= ph[..., None, None]
    a = complex(np.linalg.det(F[0, 0]))
    s = a ** -0.5
    F[..., :, :2] *= s
    return NormalizedFrame(frame.u, frame.v, F, L.L_im, a)


def gauss3(F):
    """g3 = F P1 F^T at every node."""
    F = np.asarray(F, dtype=complex)
    return F @ P1 @ np.swapaxes(F, -1, -2)


@dataclass(frozen=True, eq=False)
class AlphaSplit:
    k_u: np.ndarray
    k_v: np.ndarray
    p_u: np.ndarray
    p_v: np.ndarray
    parts_u: list
    parts_v: list

    def reconstruction_error(self, U, V):
        return float(max(np.max(np.abs(self.k_u + self.p_u - U)),
                         np.max(np.abs(self.k_v + self.p_v - V))))


def split_alpha(U, V, tol=1e-9):
    """alpha_k is the g_0 part; alpha_p the rest, with its six eigencomponents."""
    k_u = eigenspace_project(U, 0, tol)
    k_v = eigenspace_project(V, 0, tol)
    p_u = np.asarray(U) - k_u
    p_v = np.asarray(V) - k_v
    return AlphaSplit(k_u, k_v, p_u, p_v, eigen_decompose(p_u, tol), eigen_decompose(p_v, tol))


def alpha_from_frame(frame_field):
    """F^{-1} F_u and F^{-1} F_v by second-order finite differences.

    The O(h^2) trace left by differencing is removed so the result can be
    split into eigenspaces.
    """
    F, u, v = frame_field.F, frame_field.u, frame_field.v
    Finv = np.linalg.inv(F)
    Fu = np.gradient(F, u[1] - u[0], axis=0, edge_order=2)
    Fv = np.gradient(F, v[1] - v[0], axis=1, edge_order=2)
    out = []
    for A in (Finv @ Fu, Finv @ Fv):
        tr = np.trace(A, axis1=-2, axis2=-1)[..., None, None]
        out.append(A - tr / 3 * np.eye(3))
    return tuple(out)


def primitive_check(alpha, tol=PRIMITIVE_TOL):
    """Is alpha_p^u in g_5 and alpha_p^v in g_1 at every node?

    ``alpha`` is an :class:`MCForm` (evaluated at lambda = 1) or a pair of
    matrix fields (U, V).  The tolerance is relative to max |alpha|.
    Returns ``(passed, report)``; the report holds the largest offending
    eigencomponent (max-abs entry) for each direction.
    """
    U, V = alpha.at(1.0) if isinstance(alpha, MCForm) else alpha
    U = np.asarray(U, dtype=complex)
    V = np.asarray(V, dtype=complex)
    split = split_alpha(U, V)
    off = lambda p, parts, keep: float(np.max(np.abs(p - parts[keep]))) if p.size else 0.0
    off_u = off(split.p_u, split.parts_u, U_SLOT)
    off_v = off(split.p_v, split.parts_v, V_SLOT)
    scale = max(float(np.max(np.abs(U), initial=0.0)), float(np.max(np.abs(V), initial=0.0)), 1e-300)
    bound = tol * scale
    passed = max(off_u, off_v) <= bound
    return passed, {
        "offending_u": off_u,
        "offending_v": off_v,
        "offending": max(off_u, off_v),
        "scale": scale,
        "tolerance": bound,
        "pass": bool(passed),
    }


def quasi_symmetric_check(n=50, seed=0):
    """sigma tau sigma = tau on samples, and the stabilizer diag(a, 1/a, 1) of P1."""
    rng = np.random.default_rng(seed)
    X = random_traceless(rng, n)
    report = {
        "sigma_tau_sigma_equals_tau": float(np.max(np.abs(
            sigma_hat_alg(tau_hat_alg(sigma_hat_alg(X))) - tau_hat_alg(X)))),
    }
    for a in (2.0, 0.5, -1.0):
        k = np.diag([a, 1 / a, 1]).astype(complex)
        report[f"stabilizer_a={a:g}"] = float(np.max(np.abs(k @ P1 @ k.T - P1)))
        report[f"sigma_fixed_a={a:g}"] = float(np.max(np.abs(sigma_hat_grp(k) - k)))
    bad = np.diag([2, 2, 0.25]).astype(complex)
    report["non_stabilizer_control"] = float(np.max(np.abs(bad @ P1 @ bad.T - P1)))
    return report
