"""Run configuration: JSON parsing, presets and validation."""
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .tzitzeica import GoursatData, rp_omega

DEFAULT_TOLERANCES = {
    "tzitzeica": 1e-3,
    "compatibility": 1e-6,
    "flatness_factor": 5.0,
    "flatness_floor": 1e-6,
    "drift": 1e-6,
    "twisting": 1e-12,
    "lift_norm": 1e-6,
    "lift_identity": 1e-4,
    "e_omega_rel": 5e-4,
    "cubic": 1e-2,
    "mean_curvature": 1e-3,
    "real_parts": 1e-3,
    "primitive": 1e-6,
    "oracle": 1e-6,
    "closure": 1e-12,
}

COEFF_PRESETS = {"rp": (0.0, 0.0), "clifford": (1.0, -1.0)}
BOUNDARY_PRESETS = ("zero", "rp")
REQUIRED = ("domain", "grid", "q", "r")


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


@dataclass(frozen=True, eq=False)
class RunConfig:
    domain: tuple
    grid: tuple
    boundary: object
    q: object
    r: object
    ell_im: float = 0.0
    m_im: float = 0.0
    lambdas: tuple = (1.0,)
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    outputs: str = "out"

    @property
    def minimal(self):
        return self.ell_im == 0 and self.m_im == 0

    def axes(self):
        u0, u1, v0, v1 = self.domain
        nu, nv = self.grid
        return np.linspace(u0, u1, nu + 1), np.linspace(v0, v1, nv + 1)

    def goursat_data(self):
        u, v = self.axes()
        if self.boundary == "zero":
            bu, bv = 0.0, 0.0
        elif self.boundary == "rp":
            bu, bv = rp_omega(u, v[0]), rp_omega(u[0], v)
        else:
            bu, bv = self.boundary["u_axis"], self.boundary["v_axis"]
        q = COEFF_PRESETS[self.q][0] if isinstance(self.q, str) else self.q
        r = COEFF_PRESETS[self.r][1] if isinstance(self.r, str) else self.r
        try:
            return GoursatData.build(self.domain, self.grid[0], self.grid[1], bu, bv, q, r,
                                     self.ell_im, self.m_im)
        except ValueError as exc:
            raise ConfigError(f"boundary/q/r: {exc}") from None

    def to_json(self):
        return {
            "domain": dict(zip(("u0", "u1", "v0", "v1"), self.domain)),
            "grid": {"Nu": self.grid[0], "Nv": self.grid[1]},
            "boundary": self.boundary,
            "q": self.q,
            "r": self.r,
            "ell_im": self.ell_im,
            "m_im": self.m_im,
            "lambdas": [[complex(x).real, complex(x).imag] for x in self.lambdas],
            "tolerances": dict(sorted(self.tolerances.items())),
            "outputs": self.outputs,
        }


def _number(value, name):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"field '{name}' must be a number")
    if not np.isfinite(value):
        raise ConfigError(f"field '{name}' must be finite")
    return float(value)


def _coeff(value, name, n):
    if isinstance(value, str):
        if value not in COEFF_PRESETS:
            raise ConfigError(f"field '{name}': unknown preset {value!r}")
        return value
    if isinstance(value, list):
        if len(value) != n:
            raise ConfigError(f"field '{name}' needs {n} samples, got {len(value)}")
        return [_number(x, name) for x in value]
    return _number(value, name)


def parse_lambda(value, name="lambdas"):
    """A lambda given as [re, im] or a plain number; zero is rejected."""
    if isinstance(value, list):
        if len(value) != 2:
            raise ConfigError(f"field '{name}': lambda pairs are [re, im]")
        lam = complex(_number(value[0], name), _number(value[1], name))
    else:
        lam = complex(_number(value, name))
    if lam == 0:
        raise ConfigError(f"field '{name}': lambda must be nonzero")
    return lam


def parse_config(raw):
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    for key in REQUIRED:
        if key not in raw:
            raise ConfigError(f"missing required field '{key}'")
    d = raw["domain"]
    try:
        domain = tuple(_number(d[k], f"domain.{k}") for k in ("u0", "u1", "v0", "v1"))
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"field 'domain' needs u0, u1, v0, v1 (missing {exc})") from None
    if not (domain[1] > domain[0] and domain[3] > domain[2]):
        raise ConfigError("field 'domain' needs u1 > u0 and v1 > v0")
    g = raw["grid"]
    try:
        grid = (g["Nu"], g["Nv"])
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"field 'grid' needs Nu and Nv (missing {exc})") from None
    if not all(isinstance(x, int) and not isinstance(x, bool) and x >= 2 for x in grid):
        raise ConfigError("field 'grid': Nu and Nv must be integers >= 2")
    boundary = raw.get("boundary", "zero")
    if isinstance(boundary, str):
        if boundary not in BOUNDARY_PRESETS:
            raise ConfigError(f"field 'boundary': unknown preset {boundary!r}")
    elif isinstance(boundary, dict):
        clean = {}
        for key, n in (("u_axis", grid[0] + 1), ("v_axis", grid[1] + 1)):
            vals = boundary.get(key)
            if not isinstance(vals, list) or len(vals) != n:
                raise ConfigError(f"field 'boundary.{key}' needs {n} samples")
            clean[key] = [_number(x, f"boundary.{key}") for x in vals]
        boundary = clean
    else:
        raise ConfigError("field 'boundary' must be a preset name or {u_axis, v_axis}")
    tolerances = dict(DEFAULT_TOLERANCES)
    for key, val in (raw.get("tolerances") or {}).items():
        tolerances[key] = check_tolerance(key, val)
    lambdas = raw.get("lambdas", [[1.0, 0.0]])
    if not isinstance(lambdas, list) or not lambdas:
        raise ConfigError("field 'lambdas' must be a non-empty list")
    return RunConfig(
        domain=domain,
        grid=grid,
        boundary=boundary,
        q=_coeff(raw["q"], "q", grid[0] + 1),
        r=_coeff(raw["r"], "r", grid[1] + 1),
        ell_im=_number(raw.get("ell_im", 0.0), "ell_im"),
        m_im=_number(raw.get("m_im", 0.0), "m_im"),
        lambdas=tuple(parse_lambda(x) for x in lambdas),
        tolerances=tolerances,
        outputs=str(raw.get("outputs", "out")),
    )


def check_tolerance(name, value):
    if name not in DEFAULT_TOLERANCES:
        raise ConfigError(f"unknown tolerance '{name}'")
    value = _number(value, f"tolerances.{name}")
    if value <= 0:
        raise ConfigError(f"tolerance '{name}' must be positive")
    return value


def load_config(path):
    """Read and validate a JSON config; syntax errors report line and column."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return parse_config(raw)


def preset(name, n=None):
    """Configs reproducing the two closed-form examples (h = 1/256 and 1/128)."""
    n = n or 128
    if name == "rp":
        raw = {"domain": {"u0": 0, "u1": 0.5, "v0": 0, "v1": 0.5}, "boundary": "rp",
               "q": "rp", "r": "rp"}
    elif name == "clifford":
        raw = {"domain": {"u0": 0, "u1": 1, "v0": 0, "v1": 1}, "boundary": "zero",
               "q": "clifford", "r": "clifford"}
    else:
        raise ConfigError(f"unknown example {name!r}; choose rp or clifford")
    raw["grid"] = {"Nu": n, "Nv": n}
    return parse_config(raw)
