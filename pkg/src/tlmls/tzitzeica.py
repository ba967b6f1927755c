"""Goursat problem for the Tzitzeica equation on null coordinates.

The purely imaginary coefficients Q = i q, R = i r (and, for non-minimal data,
l = i l_im, m = i m_im) are carried as real arrays, so the equation solved is
the real PDE

    omega_uv = exp(omega) + q r exp(-2 omega) - l_im m_im.
"""
from dataclasses import dataclass

import numpy as np


class BlowUpError(ArithmeticError):
    """The marching solution left the range of exp inside the domain."""

    def __init__(self, i, j, u, v):
        super().__init__(f"solution blew up at cell ({i}, {j}), u={u:.6g}, v={v:.6g}")
        self.cell = (i, j)
        self.point = (u, v)


def real_rhs(omega, q, r, ell_im=0.0, m_im=0.0):
    """Right-hand side of the compatibility equation in real carriers.

    -QR = -(iq)(ir) = +qr and m l = (i m_im)(i l_im) = -m_im l_im.
    """
    return np.exp(omega) + q * r * np.exp(-2.0 * omega) - ell_im * m_im


def uniform_axis(a, b, n):
    if not b > a:
        raise ValueError(f"empty interval [{a}, {b}]")
    if n < 2:
        raise ValueError("need at least 2 intervals per axis")
    return np.linspace(a, b, n + 1)


def _samples(value, axis):
    """Scalars, callables and arrays to an array sampled on ``axis``."""
    if callable(value):
        return np.asarray(value(axis), dtype=float) * np.ones_like(axis)
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        return np.full_like(axis, float(arr))
    if arr.shape != axis.shape:
        raise ValueError(f"expected {axis.size} samples, got {arr.size}")
    return arr.copy()


@dataclass(frozen=True, eq=False)
class GoursatData:
    """Characteristic data on the lines v = v0 and u = u0.

    ``omega_u_axis[i] = omega(u_i, v0)``, ``omega_v_axis[j] = omega(u0, v_j)``,
    ``q`` is sampled on the u-axis and ``r`` on the v-axis.  ``ell_im`` and
    ``m_im`` are optional constant source terms for non-minimal data.
    """

    u: np.ndarray
    v: np.ndarray
    omega_u_axis: np.ndarray
    omega_v_axis: np.ndarray
    q: np.ndarray
    r: np.ndarray
    ell_im: float = 0.0
    m_im: float = 0.0

    def __post_init__(self):
        for name, grid in (("u", self.u), ("v", self.v)):
            steps = np.diff(grid)
            if grid.size < 3 or not np.all(steps > 0):
                raise ValueError(f"{name} grid must be increasing with at least 3 nodes")
            if not np.allclose(steps, steps[0], rtol=1e-10, atol=0):
                raise ValueError(f"{name} grid must be uniform")
        if self.omega_u_axis.shape != self.u.shape or self.q.shape != self.u.shape:
            raise ValueError("u-axis samples do not match the u grid")
        if self.omega_v_axis.shape != self.v.shape or self.r.shape != self.v.shape:
            raise ValueError("v-axis samples do not match the v grid")
        if self.omega_u_axis[0] != self.omega_v_axis[0]:
            raise ValueError("boundary data disagree at the corner (u0, v0)")
        for name in ("omega_u_axis", "omega_v_axis", "q", "r"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"{name} has non-finite entries")

    @classmethod
    def build(cls, domain, n_u, n_v, boundary_u=0.0, boundary_v=0.0, q=0.0, r=0.0,
              ell_im=0.0, m_im=0.0):
        """Sample scalars, callables or arrays on a uniform grid.

        ``domain`` is ``(u0, u1, v0, v1)``.
        """
        u0, u1, v0, v1 = domain
        u = uniform_axis(u0, u1, n_u)
        v = uniform_axis(v0, v1, n_v)
        return cls(u, v, _samples(boundary_u, u), _samples(boundary_v, v),
                   _samples(q, u), _samples(r, v), float(ell_im), float(m_im))

    @property
    def shape(self):
        return self.u.size, self.v.size


@dataclass(frozen=True, eq=False)
class SolutionField:
    u: np.ndarray
    v: np.ndarray
    omega: np.ndarray
    q: np.ndarray
    r: np.ndarray
    ell_im: float = 0.0
    m_im: float = 0.0

    @property
    def h_u(self):
        return float(self.u[1] - self.u[0])

    @property
    def h_v(self):
        return float(self.v[1] - self.v[0])

    @property
    def shape(self):
        return self.omega.shape

    def q_field(self):
        return np.broadcast_to(self.q[:, None], self.shape)

    def r_field(self):
        return np.broadcast_to(self.r[None, :], self.shape)


def solve_goursat(data, n_u=None, n_v=None):
    """March the characteristic problem cell by cell (second order).

    For the cell with lower-left node (i, j) the new corner is predicted by
    linear extrapolation, then corrected by ``h_u h_v`` times the right-hand
    side at the cell midpoint, evaluated on the average of the four corners.
    Cells on one anti-diagonal are independent and are updated together.
    """
    nu, nv = data.shape
    if n_u is not None and n_u + 1 != nu or n_v is not None and n_v + 1 != nv:
        raise ValueError("grid size does not match the supplied boundary samples")
    hu = data.u[1] - data.u[0]
    hv = data.v[1] - data.v[0]
    w = np.empty((nu, nv))
    w[:, 0] = data.omega_u_axis
    w[0, :] = data.omega_v_axis
    q_mid = 0.5 * (data.q[1:] + data.q[:-1])
    r_mid = 0.5 * (data.r[1:] + data.r[:-1])
    hh = hu * hv
    with np.errstate(over="ignore", invalid="ignore"):
        # new corner (i+1, j+1) lies on anti-diagonal d = i + j + 2
        for d in range(2, nu + nv - 1):
            i = np.arange(max(0, d - nv), min(nu - 1, d - 1))
            j = d - 2 - i
            sw, se, nw = w[i, j], w[i + 1, j], w[i, j + 1]
            pred = se + nw - sw
            avg = 0.25 * (sw + se + nw + pred)
            rhs = real_rhs(avg, q_mid[i], r_mid[j], data.ell_im, data.m_im)
            new = pred + hh * rhs
            bad = ~np.isfinite(new)
            if bad.any():
                k = int(np.argmax(bad))
                raise BlowUpError(int(i[k]), int(j[k]), data.u[i[k]], data.v[j[k]])
            w[i + 1, j + 1] = new
    return SolutionField(data.u.copy(), data.v.copy(), w, data.q.copy(), data.r.copy(),
                         data.ell_im, data.m_im)


def mixed_derivative(f, hu, hv):
    """Central-difference f_uv at interior nodes, shape ``(nu-2, nv-2)``."""
    return (f[2:, 2:] - f[2:, :-2] - f[:-2, 2:] + f[:-2, :-2]) / (4.0 * hu * hv)


def residual(field, q=None, r=None):
    """Central-difference residual of the Tzitzeica equation at interior nodes.

    Returns ``(residual_field, max_abs)``; ``q`` and ``r`` default to the
    coefficients stored in ``field``.
    """
    w = field.omega
    if w.shape[0] < 3 or w.shape[1] < 3:
        raise ValueError("need at least a 3x3 grid")
    qf = field.q_field() if q is None else np.broadcast_to(q, w.shape)
    rf = field.r_field() if r is None else np.broadcast_to(r, w.shape)
    inner = (slice(1, -1), slice(1, -1))
    res = mixed_derivative(w, field.h_u, field.h_v) - real_rhs(
        w[inner], qf[inner], rf[inner], field.ell_im, field.m_im
    )
    return res, float(np.max(np.abs(res)))


def compatibility_check_general(omega, q, r, ell_im, m_im, hu, hv):
    """Finite-difference residuals of the full compatibility system.

    All arguments except the spacings are real fields on a common grid (or
    broadcastable to it).  Returns max-abs residuals keyed by equation:

    * ``gauss``: omega_uv - (e^w + q r e^{-2w} - l_im m_im)
    * ``closedness``: l_v - m_u
    * ``codazzi_q``: q_v e^{-2w} + (e^{-w} l_im)_u
    * ``codazzi_r``: r_u e^{-2w} + (e^{-w} m_im)_v
    """
    omega = np.asarray(omega, dtype=float)
    shape = omega.shape
    q, r, ell_im, m_im = (np.broadcast_to(np.asarray(a, dtype=float), shape)
                          for a in (q, r, ell_im, m_im))
    inner = (slice(1, -1), slice(1, -1))

    def du(f):
        return (f[2:, 1:-1] - f[:-2, 1:-1]) / (2 * hu)

    def dv(f):
        return (f[1:-1, 2:] - f[1:-1, :-2]) / (2 * hv)

    e2 = np.exp(-2 * omega[inner])
    fields = {
        "gauss": mixed_derivative(omega, hu, hv)
        - real_rhs(omega[inner], q[inner], r[inner], ell_im[inner], m_im[inner]),
        "closedness": dv(ell_im) - du(m_im),
        "codazzi_q": dv(q) * e2 + du(np.exp(-omega) * ell_im),
        "codazzi_r": du(r) * e2 + dv(np.exp(-omega) * m_im),
    }
    return {k: float(np.max(np.abs(f))) for k, f in fields.items()}


def rp_omega(u, v):
    """Closed-form solution log(4 / (uv - 2)^2) of omega_uv = exp(omega)."""
    uv = np.multiply.outer(u, v) if np.ndim(u) and np.ndim(v) else np.asarray(u) * np.asarray(v)
    return np.log(4.0 / (uv - 2.0) ** 2)
