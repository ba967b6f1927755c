"""Horizontal lifts, their identities, recovered invariants and closed-form oracles."""
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.linalg import expm

from .formats import CHART_HEADER, write_grid_csv, write_lift_csv, write_obj
from .linalg import P, herm_form

DELTA = np.exp(2j * np.pi / 3)
U_VAC = np.array([[0, 0, 1], [-1j, 0, 0], [0, 1, 0]], dtype=complex)
V_VAC = np.array([[0, 1j, 0], [0, 0, 1], [1, 0, 0]], dtype=complex)
F0 = np.array(
    [[-1j * DELTA**2, 1j * DELTA, -1j], [1j * DELTA, -1j * DELTA**2, 1j], [1, -1, 1]]
) / np.sqrt(3)
for _a in (U_VAC, V_VAC, F0):
    _a.setflags(write=False)

# N_+ = E13 + E32 is nilpotent with N_+^2 = E12.
N_PLUS = np.zeros((3, 3), dtype=complex)
N_PLUS[0, 2] = N_PLUS[2, 1] = 1
N_PLUS.setflags(write=False)


@dataclass(frozen=True, eq=False)
class LiftField:
    u: np.ndarray
    v: np.ndarray
    f: np.ndarray
    lam: complex = 1.0

    @property
    def h_u(self):
        return float(self.u[1] - self.u[0])

    @property
    def h_v(self):
        return float(self.v[1] - self.v[0])


def lift_from_frame(frame):
    """The last column F e_3 at every node."""
    return LiftField(frame.u, frame.v, np.array(frame.F[..., :, 2]), frame.lam)


def _d(f, h, axis):
    return np.gradient(f, h, axis=axis, edge_order=2)


def third_derivative(f, h, axis):
    """Third derivative along ``axis``.

    Interior nodes use the central stencil (-1, 2, 0, -2, 1) / 2h^3, the two
    outermost lines on each side the one-sided 4-point stencil.
    """
    f = np.moveaxis(np.asarray(f), axis, 0)
    n = f.shape[0]
    if n < 5:
        raise ValueError("need at least 5 nodes for a third derivative")
    out = np.empty_like(f)
    out[2:-2] = (f[4:] - 2 * f[3:-1] + 2 * f[1:-3] - f[:-4]) / (2 * h**3)
    for k in (0, 1):
        out[k] = (-f[k] + 3 * f[k + 1] - 3 * f[k + 2] + f[k + 3]) / h**3
        out[n - 1 - k] = (f[n - 1 - k] - 3 * f[n - 2 - k] + 3 * f[n - 3 - k] - f[n - 4 - k]) / h**3
    return np.moveaxis(out, 0, axis)


def verify_lift(lift, immersion_tol=1e-12):
    """Max-abs residuals of the lift identities.

    ``min_re_fu_fv`` must be positive for an immersion; ``degenerate`` flags
    lifts where it is not.
    """
    if lift.f.shape[0] < 3 or lift.f.shape[1] < 3:
        raise ValueError("need at least a 3x3 grid")
    f = lift.f
    fu = _d(f, lift.h_u, 0)
    fv = _d(f, lift.h_v, 1)
    fufv = herm_form(fu, fv)
    mx = lambda a: float(np.max(np.abs(a)))
    min_re = float(np.min(fufv.real))
    return {
        "norm": mx(herm_form(f, f) + 1),
        "fu_null": mx(herm_form(fu, fu)),
        "fv_null": mx(herm_form(fv, fv)),
        "im_fu_fv": mx(fufv.imag),
        "horizontal_u": mx(herm_form(fu, f)),
        "horizontal_v": mx(herm_form(fv, f)),
        "min_re_fu_fv": min_re,
        "degenerate": bool(min_re <= immersion_tol),
    }


@dataclass(frozen=True, eq=False)
class SurfaceInvariants:
    """Invariants recovered from a lift.

    ``Q``, ``R``, ``ell`` and ``m`` are complex fields; for a genuine
    horizontal lift their real parts vanish up to stencil error.
    """

    u: np.ndarray
    v: np.ndarray
    e_omega: np.ndarray
    im_fu_fv: np.ndarray
    Q: np.ndarray
    R: np.ndarray
    ell: np.ndarray
    m: np.ndarray
    H: np.ndarray

    @property
    def omega(self):
        return np.log(self.e_omega)

    def spurious_real_parts(self, margin=0):
        """Max |Re| of Q, R, l, m, ignoring ``margin`` lines on each edge."""
        s = slice(margin, -margin or None)
        return {k: float(np.max(np.abs(getattr(self, k)[s, s].real)))
                for k in ("Q", "R", "ell", "m")}


def recover_invariants(lift):
    """e^w = <f_u, f_v>, H = e^{-w} f_uv - f, l = <H, f_u>, m = <H, f_v>,
    Q = <f_uuu, f>, R = <f_vvv, f>."""
    f = lift.f
    fu = _d(f, lift.h_u, 0)
    fv = _d(f, lift.h_v, 1)
    fuv = _d(fu, lift.h_v, 1)
    fufv = herm_form(fu, fv)
    e_omega = fufv.real
    if np.any(e_omega <= 0):
        i, j = np.unravel_index(int(np.argmin(e_omega)), e_omega.shape)
        raise ValueError(f"<f_u, f_v> is not positive at node ({i}, {j}); not an immersion")
    H = fuv / e_omega[..., None] - f
    return SurfaceInvariants(
        lift.u, lift.v, e_omega, fufv.imag,
        Q=herm_form(third_derivative(f, lift.h_u, 0), f),
        R=herm_form(third_derivative(f, lift.h_v, 1), f),
        ell=herm_form(H, fu),
        m=herm_form(H, fv),
        H=H,
    )


@dataclass(frozen=True, eq=False)
class CHPoint:
    """Point of the indefinite complex hyperbolic plane as the projector onto C f."""

    Pi: np.ndarray

    def same_as(self, other, tol=1e-12):
        return bool(np.max(np.abs(self.Pi - other.Pi)) <= tol)


def project_to_ch(f):
    """Pi = f conj(f)^T P / <f, f>; broadcasts over leading axes."""
    f = np.asarray(f, dtype=complex)
    n = herm_form(f, f)
    if np.any(np.abs(n.imag) > 1e-12 * np.maximum(1.0, np.abs(n))) or np.any(n.real >= 0):
        raise ValueError("project_to_ch needs <f, f> < 0")
    outer = f[..., :, None] * np.conj(f)[..., None, :]
    return CHPoint(outer @ P / n.real[..., None, None])


def _rp_frame(u, v, lam):
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    uv = u * v
    if np.any(np.abs(uv - 2) < 1e-12):
        raise ValueError("RP oracle is singular on uv = 2")
    eh = 2 / np.abs(2 - uv)
    a = u / lam
    b = lam * v
    I = np.eye(3, dtype=complex)
    E12 = np.zeros((3, 3), dtype=complex)
    E12[0, 1] = 1
    left = I + a[..., None, None] * N_PLUS + (a**2 / 2)[..., None, None] * E12
    right = I + b[..., None, None] * N_PLUS.T + (b**2 / 2)[..., None, None] * E12.T
    mid = np.zeros(u.shape + (3, 3), dtype=complex)
    mid[..., 0, 0] = 1 / eh
    mid[..., 1, 1] = eh
    mid[..., 2, 2] = 1
    return left @ mid @ right


def oracle_rp(u, v, lam=1.0):
    """Closed-form frame and lift for w = log(4 / (uv - 2)^2), Q = R = 0.

    F = exp(u N_+ / lam) diag(e^{-w/2}, e^{w/2}, 1) exp(lam v N_+^T) with
    N_+ = E13 + E32.  Inputs broadcast; real nonzero ``lam``.
    """
    if lam == 0:
        raise ValueError("lambda must be nonzero")
    F = _rp_frame(u, v, lam)
    return F, F[..., :, 2]


def rp_lift_formula(u, v, lam=1.0):
    """(2u / lam, 2 lam v, 2 + uv) / (2 - uv), valid for uv < 2."""
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    return np.stack([2 * u / lam, 2 * lam * v, 2 + u * v], axis=-1) / (2 - u * v)[..., None]


def clifford_f0(u, v):
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    d = DELTA
    return np.stack([
        np.exp(1j * (d * u - d**2 * v)),
        -np.exp(1j * (d**2 * u - d * v)),
        np.exp(1j * (u - v)),
    ], axis=-1) / np.sqrt(3)


def oracle_clifford(u, v, lam=1.0):
    """exp(U_vac u / lam + lam V_vac v) and its last column; inputs broadcast."""
    if lam == 0:
        raise ValueError("lambda must be nonzero")
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    X = (u / lam)[..., None, None] * U_VAC + (lam * v)[..., None, None] * V_VAC
    F = expm(X)
    return F, F[..., :, 2]


def closure_check_clifford(a, N, period=2 * np.pi):
    """max |f0(u + period, a - u - period) - f0(u, a - u)| over N samples of u in [0, 2 pi)."""
    if N < 8:
        raise ValueError("N must be at least 8")
    u = np.linspace(0, 2 * np.pi, N, endpoint=False)
    w = u + period
    return float(np.max(np.abs(clifford_f0(w, a - w) - clifford_f0(u, a - u))))


def chart(f):
    """Affine chart w1 = f1 / f3, w2 = f2 / f3 and the mask of nodes with f3 != 0."""
    f3 = f[..., 2]
    ok = np.abs(f3) > 1e-300
    safe = np.where(ok, f3, 1)
    w = np.stack([f[..., 0] / safe, f[..., 1] / safe], axis=-1)
    return np.where(ok[..., None], w, np.nan), ok


def export_surface(lift, out_dir, stem="surface", chart_export=False, obj=False):
    """Write the lift CSV and optionally the chart CSV and an OBJ mesh.

    Returns a dict of written paths and the number of chart nodes skipped
    because f3 vanishes there.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = {"lift": out / f"{stem}.csv"}
    write_lift_csv(written["lift"], lift.u, lift.v, lift.f)
    skipped = 0
    if chart_export or obj:
        w, ok = chart(lift.f)
        skipped = int((~ok).sum())
        if chart_export:
            written["chart"] = out / f"{stem}_chart.csv"
            write_grid_csv(written["chart"], CHART_HEADER, lift.u, lift.v, w, mask=ok)
        if obj:
            written["obj"] = out / f"{stem}.obj"
            verts = np.stack([w[..., 0].real, w[..., 0].imag, w[..., 1].real], axis=-1)
            write_obj(written["obj"], verts, ok)
    return {"files": {k: str(p) for k, p in written.items()}, "chart_skipped": skipped}
