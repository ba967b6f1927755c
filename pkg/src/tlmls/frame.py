"""Maurer-Cartan families, flatness and extended-frame integration.

An :class:`MCForm` stores the lambda-dependent pair (U^lam, V^lam) as two
Laurent polynomials in lambda whose coefficients are grid fields of 3x3
matrices, so both the grid evaluator and the per-node loop are available.
"""
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .linalg import IDENTITY, P, dagger, u21_defect
from .loops import EPS, UNIT_CIRCLE_PROBES, LoopMatrix

DRIFT_HARD_BOUND = 1e-4

#: lambda probes for flatness: cube roots of unity and their negatives, two
#: real values off the unit circle, and the 16 unit-circle loop probes.
FLATNESS_PROBES = np.concatenate([
    np.array([1.0, EPS, EPS**2, -1.0, 0.7, 1.3], dtype=complex),
    UNIT_CIRCLE_PROBES,
])


class ClosednessError(ValueError):
    """The mean curvature 1-form l du + m dv is not closed within tolerance."""


class DriftError(ArithmeticError):
    def __init__(self, drift, node, point):
        super().__init__(
            f"frame drift {drift:.3e} exceeds {DRIFT_HARD_BOUND:.0e} at node {node}, "
            f"(u, v) = ({point[0]:.6g}, {point[1]:.6g})"
        )
        self.drift = drift
        self.node = node
        self.point = point


def _d(f, h, axis):
    """Central differences inside, second-order one-sided at the edges."""
    return np.gradient(f, h, axis=axis, edge_order=2)


def _grid_field(a, shape):
    return np.broadcast_to(np.asarray(a, dtype=float), shape).astype(float)


@dataclass(frozen=True, eq=False)
class LIntegral:
    """Imaginary part of the primitive of L = l du + m dv, zero at the basepoint."""

    u: np.ndarray
    v: np.ndarray
    L_im: np.ndarray


def closedness_residual(ell_im, m_im, hu, hv):
    """max |l_v - m_u| with central differences."""
    return float(np.max(np.abs(_d(ell_im, hv, 1) - _d(m_im, hu, 0))))


def compute_L_integral(ell_im, m_im, u, v, tol=1e-6):
    """Trapezoidal path integral of L along v = v0, then along each u = const."""
    shape = (u.size, v.size)
    ell_im = _grid_field(ell_im, shape)
    m_im = _grid_field(m_im, shape)
    res = closedness_residual(ell_im, m_im, u[1] - u[0], v[1] - v[0])
    if res > tol:
        raise ClosednessError(f"l_v - m_u = {res:.3e} exceeds tol {tol:.1e}")
    first = cumulative_trapezoid(ell_im[:, 0], u, initial=0.0)
    L = first[:, None] + cumulative_trapezoid(m_im, v, axis=1, initial=0.0)
    return LIntegral(u, v, L)


@dataclass(frozen=True, eq=False)
class MCForm:
    u: np.ndarray
    v: np.ndarray
    U: LoopMatrix
    V: LoopMatrix
    flavor: str

    @property
    def shape(self):
        return self.u.size, self.v.size

    @property
    def h_u(self):
        return float(self.u[1] - self.u[0])

    @property
    def h_v(self):
        return float(self.v[1] - self.v[0])

    def at(self, lam):
        if lam == 0:
            raise ValueError("spectral parameter must be nonzero")
        return self.U(lam), self.V(lam)

    def node_loops(self, i, j):
        """(U, V) at one node as Laurent loops with plain 3x3 coefficients."""
        pick = lambda g: LoopMatrix({k: c[i, j] for k, c in g.coeffs.items()})
        return pick(self.U), pick(self.V)


def _zeros(shape):
    return np.zeros(shape + (3, 3), dtype=complex)


def _omega_parts(field):
    w = field.omega
    return w, _d(w, field.h_u, 0), _d(w, field.h_v, 1), np.exp(w / 2), np.exp(-w)


def build_minimal_mc(field):
    """lambda-family for minimal data: U has lambda^-1 entries, V lambda^+1."""
    w, wu, wv, eh, em = _omega_parts(field)
    shape = w.shape
    Q = 1j * field.q_field()
    R = 1j * field.r_field()
    Um, U0, V0, V1 = (_zeros(shape) for _ in range(4))
    U0[..., 0, 0] = wu / 2
    U0[..., 1, 1] = -wu / 2
    Um[..., 0, 2] = eh
    Um[..., 1, 0] = -Q * em
    Um[..., 2, 1] = eh
    V0[..., 0, 0] = -wv / 2
    V0[..., 1, 1] = wv / 2
    V1[..., 0, 1] = -R * em
    V1[..., 1, 2] = eh
    V1[..., 2, 0] = eh
    return MCForm(field.u, field.v, LoopMatrix({-1: Um, 0: U0}),
                  LoopMatrix({0: V0, 1: V1}), "minimal")


def build_general_mc(field, ell_im, m_im, L=None, tol=1e-6):
    """lambda-family of the frame F D for data with l, m not necessarily zero.

    At lambda = 1 this is the Maurer-Cartan form of the coordinate frame
    right-multiplied by D = diag(e^{-L}, e^{-L}, 1).
    """
    w, wu, wv, eh, em = _omega_parts(field)
    shape = w.shape
    ell_im = _grid_field(ell_im, shape)
    m_im = _grid_field(m_im, shape)
    res = closedness_residual(ell_im, m_im, field.h_u, field.h_v)
    if res > tol:
        raise ClosednessError(f"l_v - m_u = {res:.3e} exceeds tol {tol:.1e}")
    if L is None:
        L = compute_L_integral(ell_im, m_im, field.u, field.v, tol)
    ep = eh * np.exp(1j * L.L_im)
    en = eh * np.exp(-1j * L.L_im)
    Q = 1j * field.q_field()
    R = 1j * field.r_field()
    Um, U0, U1, Vm, V0, V1 = (_zeros(shape) for _ in range(6))
    U0[..., 0, 0] = wu / 2
    U0[..., 1, 1] = -wu / 2
    U1[..., 0, 1] = 1j * m_im
    Um[..., 0, 2] = ep
    Um[..., 1, 0] = -Q * em
    Um[..., 2, 1] = en
    V0[..., 0, 0] = -wv / 2
    V0[..., 1, 1] = wv / 2
    Vm[..., 1, 0] = 1j * ell_im
    V1[..., 0, 1] = -R * em
    V1[..., 1, 2] = ep
    V1[..., 2, 0] = en
    return MCForm(field.u, field.v, LoopMatrix({-1: Um, 0: U0, 1: U1}),
                  LoopMatrix({-1: Vm, 0: V0, 1: V1}), "general")


def build_coordinate_mc(field, ell_im, m_im):
    """Maurer-Cartan form of the coordinate frame itself (no spectral parameter).

    Unlike the normalized family its trace is 2L, so the frame has
    determinant exp(2 i L_im).
    """
    w, wu, wv, eh, em = _omega_parts(field)
    shape = w.shape
    ell = 1j * _grid_field(ell_im, shape)
    m = 1j * _grid_field(m_im, shape)
    Q = 1j * field.q_field()
    R = 1j * field.r_field()
    U, V = _zeros(shape), _zeros(shape)
    U[..., 0, 0] = ell + wu / 2
    U[..., 0, 1] = m
    U[..., 0, 2] = eh
    U[..., 1, 0] = -Q * em
    U[..., 1, 1] = ell - wu / 2
    U[..., 2, 1] = eh
    V[..., 0, 0] = m - wv / 2
    V[..., 0, 1] = -R * em
    V[..., 1, 0] = ell
    V[..., 1, 1] = m + wv / 2
    V[..., 1, 2] = eh
    V[..., 2, 0] = eh
    return MCForm(field.u, field.v, LoopMatrix({0: U}), LoopMatrix({0: V}), "coordinate")


def flatness_residual(mc, lam):
    """Per-node max-abs of U_v - V_u + [V, U] at interior nodes, and its max."""
    U, V = mc.at(lam)
    Uv = (U[1:-1, 2:] - U[1:-1, :-2]) / (2 * mc.h_v)
    Vu = (V[2:, 1:-1] - V[:-2, 1:-1]) / (2 * mc.h_u)
    Ui, Vi = U[1:-1, 1:-1], V[1:-1, 1:-1]
    K = Uv - Vu + Vi @ Ui - Ui @ Vi
    per_node = np.max(np.abs(K), axis=(-2, -1))
    return per_node, float(per_node.max())


def curvature(mc, lam):
    """Full interior curvature field U_v - V_u + [V, U] (matrix valued)."""
    U, V = mc.at(lam)
    Uv = (U[1:-1, 2:] - U[1:-1, :-2]) / (2 * mc.h_v)
    Vu = (V[2:, 1:-1] - V[:-2, 1:-1]) / (2 * mc.h_u)
    Ui, Vi = U[1:-1, 1:-1], V[1:-1, 1:-1]
    return Uv - Vu + Vi @ Ui - Ui @ Vi


@dataclass(frozen=True, eq=False)
class FrameField:
    lam: complex
    u: np.ndarray
    v: np.ndarray
    F: np.ndarray
    drift: np.ndarray
    order: str = "u-first"

    @property
    def basepoint(self):
        return self.F[0, 0]

    @property
    def max_drift(self):
        return float(self.drift.max())


def _is_real(lam):
    return abs(complex(lam).imag) <= 1e-15 * max(1.0, abs(lam))


def frame_drift(F, lam):
    """U(2,1) defect for real lambda; |det F - 1| otherwise.

    For non-real lambda the extended frame lies in SL(3, C) but in no
    particular real form, so only the determinant is monitored.
    """
    if _is_real(lam):
        return u21_defect(F)
    return np.abs(np.linalg.det(F) - 1)


def _march(F0, A, h):
    """Classical RK4 for F' = F A along the second axis of ``A``.

    ``F0`` has shape (batch, 3, 3) and ``A`` (batch, n, 3, 3); half-step
    coefficients are the average of the two adjacent nodes.
    """
    out = np.empty(A.shape, dtype=complex)
    out[:, 0] = F0
    F = F0
    for k in range(A.shape[1] - 1):
        a0, a1 = A[:, k], A[:, k + 1]
        am = 0.5 * (a0 + a1)
        k1 = h * (F @ a0)
        k2 = h * ((F + 0.5 * k1) @ am)
        k3 = h * ((F + 0.5 * k2) @ am)
        k4 = h * ((F + k3) @ a1)
        F = F + (k1 + 2 * k2 + 2 * k3 + k4) / 6
        out[:, k + 1] = F
    return out


def reunitarize(F, iterations=3):
    """Newton iteration X <- (X + (P X^H P)^{-1}) / 2 towards U(2,1).

    Off by default: it can move a frame far from its start if the drift
    is large, whereas monitoring keeps errors visible.
    """
    X = np.array(F, dtype=complex)
    for _ in range(iterations):
        X = 0.5 * (X + np.linalg.inv(P @ dagger(X) @ P))
    return X


def integrate_frame(mc, lam, order="u-first", hard_bound=DRIFT_HARD_BOUND, reunitarize_frame=False):
    """Solve F^{-1} dF = U du + V dv with F(u0, v0) = id.

    ``u-first`` integrates along the line v = v0 first and then up every
    line u = const; ``v-first`` is the transposed path.
    """
    U, V = mc.at(lam)
    nu, nv = mc.shape
    start = IDENTITY[None].copy()
    if order == "u-first":
        edge = _march(start, U[None, :, 0], mc.h_u)[0]
        F = _march(edge, V, mc.h_v)
    elif order == "v-first":
        edge = _march(start, V[None, 0, :], mc.h_v)[0]
        F = np.swapaxes(_march(edge, np.swapaxes(U, 0, 1), mc.h_u), 0, 1)
    else:
        raise ValueError(f"unknown integration order {order!r}")
    if reunitarize_frame and _is_real(lam):
        F = reunitarize(F)
    drift = frame_drift(F, lam)
    worst = float(drift.max())
    if worst > hard_bound:
        i, j = np.unravel_index(int(np.argmax(drift)), drift.shape)
        raise DriftError(worst, (int(i), int(j)), (float(mc.u[i]), float(mc.v[j])))
    return FrameField(complex(lam), mc.u, mc.v, F, drift, order)


def path_independence(mc, lam):
    """Max entry difference between u-first and v-first integration."""
    a = integrate_frame(mc, lam, "u-first", hard_bound=np.inf)
    b = integrate_frame(mc, lam, "v-first", hard_bound=np.inf)
    return float(np.max(np.abs(a.F - b.F)))


def gauge_by_G(frame, lam):
    """Right-multiply every node by diag(lam, 1/lam, 1), lam real and nonzero."""
    if not _is_real(lam) or lam == 0:
        raise ValueError("gauge by G needs a real nonzero lambda")
    lam = complex(lam).real
    G = np.diag([lam, 1 / lam, 1]).astype(complex)
    F = frame.F @ G
    return FrameField(frame.lam, frame.u, frame.v, F, frame_drift(F, frame.lam), frame.order)
