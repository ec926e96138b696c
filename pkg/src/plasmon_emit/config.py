"""Flat ``key = value`` run configuration and named figure presets."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace

from .errors import ParseError
from .greens_mie import SphereSpec
from .spectral import DIPOLE_CONFIGS, EmitterSpec

QD_TAU0_FS = 4.0e6  # quantum dot, 4 ns
JAGR_TAU0_FS = 7.0e4  # J-aggregate, 70 ps
SOLVERS = ("eigen", "eigen_pm", "volterra", "markov")
SQRT_HALF = math.sqrt(0.5)


@dataclass(frozen=True)
class RunConfig:
    scenario: str = ""
    # sphere
    radius_nm: float = 5.0
    omega_p_ev: float = 9.176
    eps_inf: float = 3.718
    gamma_ev: float = 0.021
    eps_background: float = 1.0
    # emitter
    omega0_ev: float = 3.84
    tau0_fs: float = QD_TAU0_FS
    dipole_config: str = "v_circular"
    init: str = "state1"
    # geometry
    D_nm: float = 1.0
    # numerics
    M: int = 1001
    band_lo_ev: float = 3.5
    band_hi_ev: float = 4.5
    t_max_fs: float = 500.0
    dt_out_fs: float = 0.25
    fca: bool = False
    solver: str = "eigen_pm"
    volterra_dt_fs: float = 0.005
    table_step_ev: float = 0.0005
    truncation: int = 200
    # enhancement map
    grid_omega_lo_ev: float = 3.0
    grid_omega_hi_ev: float = 4.6
    grid_omega_n: int = 801
    grid_D_lo_nm: float = 1.0
    grid_D_hi_nm: float = 3.0
    grid_D_n: int = 21
    # files
    output: str = ""
    cache: str = ""

    def sphere(self) -> SphereSpec:
        return SphereSpec(
            self.radius_nm, self.omega_p_ev, self.eps_inf, self.gamma_ev, self.eps_background
        )

    def amplitudes(self) -> tuple:
        return parse_init(self.init)

    def emitter(self) -> EmitterSpec:
        return EmitterSpec(self.omega0_ev, self.tau0_fs, self.dipole_config, self.amplitudes())

    @property
    def band(self):
        return (self.band_lo_ev, self.band_hi_ev)


FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}
_CASTERS = {"float": float, "int": int, "bool": None, "str": str}


# name -> (overrides, note)
PRESETS = {
    "fig2": (
        dict(grid_omega_lo_ev=3.0, grid_omega_hi_ev=4.6, grid_omega_n=1601,
             grid_D_lo_nm=1.0, grid_D_hi_nm=3.0, grid_D_n=41),
        "enhancement maps lambda_perp / lambda_par vs (omega, D)",
    ),
    "fig3": (dict(tau0_fs=QD_TAU0_FS, omega0_ev=3.84, D_nm=1.0, init="state1"),
             "reference lambda_perp(3.84,1)=1.13e5, lambda_par(3.84,1)=2.8e4"),
    "fig3-sis": (dict(tau0_fs=QD_TAU0_FS, omega0_ev=3.84, D_nm=1.0, init="sis"), ""),
    "fig3-ais": (dict(tau0_fs=QD_TAU0_FS, omega0_ev=3.84, D_nm=1.0, init="ais"), ""),
    "fig4": (dict(tau0_fs=JAGR_TAU0_FS, omega0_ev=3.84, D_nm=2.0, init="state1"),
             "reference lambda_perp(3.84,2)=4.40e4, lambda_par(3.84,2)=1.07e4"),
    "fig4-sis": (dict(tau0_fs=JAGR_TAU0_FS, omega0_ev=3.84, D_nm=2.0, init="sis"), ""),
    "fig4-ais": (dict(tau0_fs=JAGR_TAU0_FS, omega0_ev=3.84, D_nm=2.0, init="ais"), ""),
    "fig5": (dict(tau0_fs=JAGR_TAU0_FS, omega0_ev=3.84, D_nm=1.55, init="state1"),
             "reference lambda_perp(3.84,1.55)=7.50e4, lambda_par(3.84,1.55)=1.85e4"),
    "fig6-sis": (dict(tau0_fs=JAGR_TAU0_FS, omega0_ev=3.84, D_nm=1.55, init="sis"), ""),
    "fig6-ais": (dict(tau0_fs=JAGR_TAU0_FS, omega0_ev=3.84, D_nm=1.55, init="ais"), ""),
    "fig7-sis": (dict(tau0_fs=QD_TAU0_FS, omega0_ev=4.16, D_nm=1.0, init="sis"),
                 "reference lambda_perp(4.16,1)=6.54e5; lambda_par=2.83e5 carries the label "
                 "(3.84,1) where published, read here as lambda_par(4.16,1)"),
    "fig7-ais": (dict(tau0_fs=QD_TAU0_FS, omega0_ev=4.16, D_nm=1.0, init="ais"),
                 "lambda_par=2.83e5 recorded under 4.16 eV (published label reads 3.84)"),
    "fig8": (dict(tau0_fs=JAGR_TAU0_FS, omega0_ev=4.16, D_nm=1.55, init="state1"),
             "reference lambda_perp(4.16,1.55)=3.21e5 (published label reads D=1), lambda_par=1.39e5"),
    "fig9-sis": (dict(tau0_fs=JAGR_TAU0_FS, omega0_ev=4.16, D_nm=1.55, init="sis"), ""),
    "fig9-ais": (dict(tau0_fs=JAGR_TAU0_FS, omega0_ev=4.16, D_nm=1.55, init="ais"), ""),
    "fig10-top": (dict(tau0_fs=JAGR_TAU0_FS, omega0_ev=3.84, D_nm=1.55, init="state1"),
                  "exact vs flat-continuum kernel; expected FCA lead (positive shift)"),
    "fig10-bottom": (dict(tau0_fs=JAGR_TAU0_FS, omega0_ev=4.16, D_nm=1.55, init="state1"),
                     "exact vs flat-continuum kernel; expected FCA lag (negative shift)"),
    "fig11-top": (dict(tau0_fs=JAGR_TAU0_FS, omega0_ev=3.84, D_nm=1.55, init="state1"),
                  "radial density with and without the (omega/omega0)^3 factor"),
    "fig11-bottom": (dict(tau0_fs=JAGR_TAU0_FS, omega0_ev=4.16, D_nm=1.55, init="state1"),
                     "radial density with and without the (omega/omega0)^3 factor"),
    "fig12-z": (dict(tau0_fs=QD_TAU0_FS, omega0_ev=4.16, D_nm=1.0, init="state1",
                     dipole_config="linear_radial"),
                "two-level emitter, dipole along z; lambda_par=2.83e5 recorded under 4.16 eV"),
    "fig12-x": (dict(tau0_fs=QD_TAU0_FS, omega0_ev=4.16, D_nm=1.0, init="state1",
                     dipole_config="linear_tangential"),
                "two-level emitter, dipole along x"),
    "fig13-d185": (dict(tau0_fs=JAGR_TAU0_FS, omega0_ev=4.16, D_nm=1.85, init="state1",
                        dipole_config="linear_radial"),
                   "reference lambda_perp(4.16,1.85)=1.39e5"),
    "fig13-d200": (dict(tau0_fs=JAGR_TAU0_FS, omega0_ev=4.16, D_nm=2.0, init="state1",
                        dipole_config="linear_radial"),
                   "reference lambda_perp(4.16,2)=4.86e4"),
}


def parse_init(text: str) -> tuple:
    text = text.strip()
    if text == "state1":
        return (1 + 0j, 0j)
    if text == "state2":
        return (0j, 1 + 0j)
    if text == "sis":
        return (SQRT_HALF + 0j, SQRT_HALF + 0j)
    if text == "ais":
        return (SQRT_HALF + 0j, -SQRT_HALF + 0j)
    if text.startswith("custom:"):
        parts = text[len("custom:"):].split(",")
        if len(parts) != 4:
            raise ValueError("custom init needs a1re,a1im,a2re,a2im")
        a1re, a1im, a2re, a2im = (float(p) for p in parts)
        return (complex(a1re, a1im), complex(a2re, a2im))
    raise ValueError(f"unknown init {text!r}")


def _convert(key: str, raw: str):
    kind = FIELD_TYPES[key]
    raw = raw.strip()
    if kind == "bool":
        low = raw.lower()
        if low in ("true", "yes", "1", "on"):
            return True
        if low in ("false", "no", "0", "off"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    if kind == "int":
        val = float(raw)
        if val != int(val):
            raise ValueError(f"not an integer: {raw!r}")
        return int(val)
    return _CASTERS[kind](raw)


def _validate(cfg: RunConfig, lines: dict) -> None:
    def fail(key, msg):
        raise ParseError(msg, line=lines.get(key), key=key)

    positive = ["radius_nm", "omega_p_ev", "omega0_ev", "tau0_fs", "D_nm", "t_max_fs",
                "dt_out_fs", "volterra_dt_fs", "table_step_ev", "grid_omega_lo_ev",
                "grid_D_lo_nm"]
    for key in positive:
        if not getattr(cfg, key) > 0:
            fail(key, f"must be positive, got {getattr(cfg, key)!r}")
    if cfg.gamma_ev < 0:
        fail("gamma_ev", "must be non-negative")
    if cfg.eps_inf < 1:
        fail("eps_inf", "must be >= 1")
    if cfg.eps_background < 1:
        fail("eps_background", "must be >= 1")
    if cfg.M < 1:
        fail("M", "must be >= 1")
    if cfg.truncation < 1:
        fail("truncation", "must be >= 1")
    if not 0 < cfg.band_lo_ev < cfg.band_hi_ev:
        fail("band_hi_ev", "band must satisfy 0 < band_lo_ev < band_hi_ev")
    if not cfg.band_lo_ev <= cfg.omega0_ev <= cfg.band_hi_ev:
        fail("omega0_ev", "omega0 must lie inside the band")
    if cfg.dipole_config not in DIPOLE_CONFIGS:
        fail("dipole_config", f"must be one of {', '.join(DIPOLE_CONFIGS)}")
    if cfg.solver not in SOLVERS:
        fail("solver", f"must be one of {', '.join(SOLVERS)}")
    if cfg.grid_omega_hi_ev < cfg.grid_omega_lo_ev or cfg.grid_omega_n < 1:
        fail("grid_omega_n", "invalid omega grid")
    if cfg.grid_D_hi_nm < cfg.grid_D_lo_nm or cfg.grid_D_n < 1:
        fail("grid_D_n", "invalid distance grid")
    if cfg.scenario and cfg.scenario not in PRESETS:
        fail("scenario", f"unknown preset {cfg.scenario!r}")
    try:
        a1, a2 = parse_init(cfg.init)
    except ValueError as exc:
        fail("init", str(exc))
    if cfg.dipole_config != "v_circular":
        a2 = 0j
    if abs(abs(a1) ** 2 + abs(a2) ** 2 - 1) > 1e-12:
        fail("init", "initial amplitudes must be normalized")


def build_config(values: dict, lines: dict | None = None) -> RunConfig:
    """Defaults, then the preset named by ``scenario``, then explicit values."""
    lines = lines or {}
    merged = {}
    scenario = values.get("scenario", "")
    if scenario:
        if scenario not in PRESETS:
            raise ParseError(f"unknown preset {scenario!r}", line=lines.get("scenario"),
                             key="scenario")
        merged.update(PRESETS[scenario][0])
    merged.update(values)
    cfg = RunConfig(**merged)
    _validate(cfg, lines)
    return cfg


def parse_pairs(text: str):
    values, lines = {}, {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ParseError(f"expected 'key = value', got {raw.strip()!r}", line=lineno)
        if key not in FIELD_TYPES:
            raise ParseError("unknown key", line=lineno, key=key)
        try:
            values[key] = _convert(key, val)
        except ValueError as exc:
            raise ParseError(f"malformed value: {exc}", line=lineno, key=key) from None
        lines[key] = lineno
    return values, lines


def parse_config(text: str, overrides=()) -> RunConfig:
    """Parse configuration text; ``overrides`` are extra ``key=value`` strings."""
    values, lines = parse_pairs(text)
    for item in overrides:
        key, sep, val = item.partition("=")
        key = key.strip()
        if not sep:
            raise ParseError(f"override must be key=value, got {item!r}", key=key or None)
        if key not in FIELD_TYPES:
            raise ParseError("unknown key in --set", key=key)
        try:
            values[key] = _convert(key, val)
        except ValueError as exc:
            raise ParseError(f"malformed value: {exc}", key=key) from None
        lines.pop(key, None)
    return build_config(values, lines)


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def echo_config(cfg: RunConfig) -> str:
    return "".join(f"{k} = {_format(v)}\n" for k, v in asdict(cfg).items())


def with_values(cfg: RunConfig, **kw) -> RunConfig:
    return replace(cfg, **kw)
