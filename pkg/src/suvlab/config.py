"""TOML run configuration: parsing, defaults, overrides, validation.

A config file holds sections mirroring the library types ([params],
[noise], [integrator], [ensemble], [grid], [crystal], ...); the CLI
merges `--set section.key=value` overrides on top, then everything is
validated with the offending key path in any error message.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from .dynamics import SCHEMES, IntegratorConfig, SuvParams
from .errors import ConfigError
from .noise import ConstantField, NoiseKind, OrnsteinUhlenbeck, WhiteNoise
from .wigner import LIMIT_ORDERS, MODES, CrystalParams, PhaseGrid

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

SUBCOMMANDS = ("trajectory", "ensemble", "sweep-gj", "sweep-tau", "sweep-scaling",
               "rabi", "flowfield", "wigner", "limits")

FORMATS = ("csv", "json", "both")

_KNOWN_KEYS = {
    "run": {"seed", "format", "out_dir"},
    "params": {"J", "G", "G_over_J", "epsilon", "n_order", "omega_rabi"},
    "noise": {"kind", "tau_t", "xi"},
    "integrator": {"dt", "scheme", "max_time", "pole_epsilon",
                   "renormalize_every_step"},
    "ensemble": {"m", "theta0", "record_stride"},
    "trajectory": {"theta0"},
    "rabi": {"t_end"},
    "flowfield": {"n_points"},
    "sweep": {"ratios", "tau_values", "scales"},
    "grid": {"x_min", "x_max", "nx", "p_min", "p_max", "np"},
    "crystal": {"m_tot", "epsilon", "n_order", "x0"},
    "wigner": {"mode", "t_end", "dt", "renormalize", "x_mean", "p_mean",
               "sigma_x", "sigma_p", "hbar"},
    "limits": {"order", "eps_sequence", "n_sequence", "t_end"},
}


@dataclass(frozen=True)
class WignerRunOptions:
    mode: str = "real_effective"
    t_end: float = 1.0
    dt: Optional[float] = None
    renormalize: bool = False
    x_mean: float = 0.0
    p_mean: float = 0.0
    sigma_x: float = 1.0
    sigma_p: float = 1.0
    hbar: float = 1.0


@dataclass(frozen=True)
class LimitRunOptions:
    order: str = "n_first"
    eps_sequence: tuple = (0.5,)
    n_sequence: tuple = (1.0, 4.0, 16.0)
    t_end: float = math.pi / 8.0


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    seed: int = 20250810
    out_format: str = "both"
    output_dir: Optional[str] = None
    params: SuvParams = field(default_factory=SuvParams)
    noise: NoiseKind = field(default_factory=WhiteNoise)
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    m: int = 10000
    theta0: Optional[float] = None
    record_stride: int = 100
    rabi_t_end: float = 1.0
    flow_n_points: int = 181
    ratios: tuple = (0.01, 1.0, 100.0)
    tau_values: tuple = (1e-4, 0.25, 1.0)
    scales: tuple = (1.0, 2.0, 4.0, 8.0)
    grid: PhaseGrid = field(
        default_factory=lambda: PhaseGrid(-4.8, 4.8, 256, -4.5, 4.5, 256))
    crystal: CrystalParams = field(default_factory=CrystalParams)
    wigner: WignerRunOptions = field(default_factory=WignerRunOptions)
    limits: LimitRunOptions = field(default_factory=LimitRunOptions)


def _parse_override_value(text: str) -> Any:
    """Interpret an override's value as a TOML literal (falling back to string)."""
    try:
        return tomllib.loads(f"v = {text}")["v"]
    except tomllib.TOMLDecodeError:
        return text


def apply_overrides(data: dict, overrides) -> dict:
    """Merge 'section.key=value' strings into nested config data (overrides win)."""
    out = {k: dict(v) if isinstance(v, dict) else v for k, v in data.items()}
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, _, raw = item.partition("=")
        parts = key.strip().split(".")
        if len(parts) != 2:
            raise ConfigError(
                f"override key {key.strip()!r} must be 'section.key'")
        section, name = parts
        out.setdefault(section, {})
        if not isinstance(out[section], dict):
            raise ConfigError(f"{section!r} is not a config section")
        out[section][name] = _parse_override_value(raw.strip())
    return out


def _reject_unknown(data: dict) -> None:
    for section, content in data.items():
        if section not in _KNOWN_KEYS:
            raise ConfigError(f"unknown config section [{section}]")
        if not isinstance(content, dict):
            raise ConfigError(f"[{section}] must be a table of keys")
        for key in content:
            if key not in _KNOWN_KEYS[section]:
                raise ConfigError(f"unknown key {section}.{key}")


def _get(data: dict, section: str, key: str, default: Any) -> Any:
    return data.get(section, {}).get(key, default)


def _require_number(data, section, key, default=None):
    v = _get(data, section, key, default)
    if v is None:
        raise ConfigError(f"missing required key {section}.{key}")
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{section}.{key} must be a number, got {v!r}")
    return float(v)


def _build_noise(data: dict) -> NoiseKind:
    noise = data.get("noise", {})
    kind = noise.get("kind", "white")
    if kind == "white":
        for k in ("tau_t", "xi"):
            if k in noise:
                raise ConfigError(f"noise.{k} is invalid for kind 'white'")
        return WhiteNoise()
    if kind == "ou":
        if "xi" in noise:
            raise ConfigError("noise.xi is invalid for kind 'ou'")
        tau = _require_number(data, "noise", "tau_t")
        try:
            return OrnsteinUhlenbeck(tau_t=tau)
        except ValueError as e:
            raise ConfigError(f"noise.tau_t: {e}") from e
    if kind == "constant":
        if "tau_t" in noise:
            raise ConfigError("noise.tau_t is invalid for kind 'constant'")
        return ConstantField(xi=_require_number(data, "noise", "xi"))
    raise ConfigError(f"noise.kind must be white|ou|constant, got {kind!r}")


def _build_params(data: dict) -> SuvParams:
    sec = data.get("params", {})
    j = _require_number(data, "params", "J", 1.0)
    if "G" in sec and "G_over_J" in sec:
        raise ConfigError("params.G and params.G_over_J are mutually exclusive")
    if "G_over_J" in sec:
        g = _require_number(data, "params", "G_over_J") * j
    else:
        g = _require_number(data, "params", "G", 1.0)
    try:
        return SuvParams(
            J=j, G=g,
            epsilon=_require_number(data, "params", "epsilon", 1.0),
            n_order=_require_number(data, "params", "n_order", 1.0),
            omega_rabi=_require_number(data, "params", "omega_rabi", 2 * math.pi))
    except ValueError as e:
        raise ConfigError(f"params: {e}") from e


def _build_integrator(data: dict) -> IntegratorConfig:
    scheme = _get(data, "integrator", "scheme", "stratonovich_heun")
    if scheme not in SCHEMES:
        raise ConfigError(f"integrator.scheme must be one of {SCHEMES}, got {scheme!r}")
    rn = _get(data, "integrator", "renormalize_every_step", True)
    if not isinstance(rn, bool):
        raise ConfigError("integrator.renormalize_every_step must be a boolean")
    try:
        return IntegratorConfig(
            dt=_require_number(data, "integrator", "dt", 1e-4),
            scheme=scheme,
            max_time=_require_number(data, "integrator", "max_time", 30.0),
            pole_epsilon=_require_number(data, "integrator", "pole_epsilon", 1e-3),
            renormalize_every_step=rn)
    except ValueError as e:
        raise ConfigError(f"integrator: {e}") from e


def _build_grid(data: dict) -> PhaseGrid:
    try:
        return PhaseGrid(
            x_min=_require_number(data, "grid", "x_min", -4.8),
            x_max=_require_number(data, "grid", "x_max", 4.8),
            nx=int(_require_number(data, "grid", "nx", 256)),
            p_min=_require_number(data, "grid", "p_min", -4.5),
            p_max=_require_number(data, "grid", "p_max", 4.5),
            np=int(_require_number(data, "grid", "np", 256)))
    except ValueError as e:
        raise ConfigError(f"grid: {e}") from e


def _build_crystal(data: dict) -> CrystalParams:
    try:
        return CrystalParams(
            m_tot=_require_number(data, "crystal", "m_tot", 1.0),
            epsilon=_require_number(data, "crystal", "epsilon", 0.0),
            n_order=_require_number(data, "crystal", "n_order", 1.0),
            x0=_require_number(data, "crystal", "x0", 0.0))
    except ValueError as e:
        raise ConfigError(f"crystal: {e}") from e


def _build_wigner_options(data: dict) -> WignerRunOptions:
    mode = _get(data, "wigner", "mode", "real_effective")
    if mode not in MODES:
        raise ConfigError(f"wigner.mode must be one of {MODES}, got {mode!r}")
    dt = _get(data, "wigner", "dt", None)
    rn = _get(data, "wigner", "renormalize", False)
    if not isinstance(rn, bool):
        raise ConfigError("wigner.renormalize must be a boolean")
    return WignerRunOptions(
        mode=mode,
        t_end=_require_number(data, "wigner", "t_end", 1.0),
        dt=None if dt is None else float(dt),
        renormalize=rn,
        x_mean=_require_number(data, "wigner", "x_mean", 0.0),
        p_mean=_require_number(data, "wigner", "p_mean", 0.0),
        sigma_x=_require_number(data, "wigner", "sigma_x", 1.0),
        sigma_p=_require_number(data, "wigner", "sigma_p", 1.0),
        hbar=_require_number(data, "wigner", "hbar", 1.0))


def _build_limits(data: dict) -> LimitRunOptions:
    order = _get(data, "limits", "order", "n_first")
    if order not in LIMIT_ORDERS:
        raise ConfigError(f"limits.order must be one of {LIMIT_ORDERS}, got {order!r}")
    eps_seq = _get(data, "limits", "eps_sequence", [0.5])
    n_seq = _get(data, "limits", "n_sequence", [1.0, 4.0, 16.0])
    for name, seq in (("eps_sequence", eps_seq), ("n_sequence", n_seq)):
        if not isinstance(seq, (list, tuple)) or not seq or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in seq):
            raise ConfigError(f"limits.{name} must be a non-empty number array")
    return LimitRunOptions(
        order=order, eps_sequence=tuple(float(v) for v in eps_seq),
        n_sequence=tuple(float(v) for v in n_seq),
        t_end=_require_number(data, "limits", "t_end", math.pi / 8.0))


def _build_sequence(data: dict, key: str, default: tuple) -> tuple:
    seq = _get(data, "sweep", key, list(default))
    if not isinstance(seq, (list, tuple)) or not seq or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in seq):
        raise ConfigError(f"sweep.{key} must be a non-empty number array")
    return tuple(float(v) for v in seq)


def resolve_config(subcommand: str, data: dict, *, seed=None, out_dir=None,
                   out_format=None) -> RunConfig:
    """Validate merged config data into a RunConfig for the given subcommand."""
    if subcommand not in SUBCOMMANDS:
        raise ConfigError(f"unknown subcommand {subcommand!r}")
    _reject_unknown(data)

    fmt = out_format or _get(data, "run", "format", "both")
    if fmt not in FORMATS:
        raise ConfigError(f"run.format must be one of {FORMATS}, got {fmt!r}")
    seed_val = seed if seed is not None else _get(data, "run", "seed", 20250810)
    if isinstance(seed_val, bool) or not isinstance(seed_val, int) or seed_val < 0:
        raise ConfigError(f"run.seed must be a non-negative integer, got {seed_val!r}")

    theta0 = _get(data, "ensemble", "theta0", None)
    if subcommand == "trajectory":
        theta0 = _get(data, "trajectory", "theta0", theta0)
    if subcommand in ("trajectory", "ensemble", "sweep-gj", "sweep-tau",
                      "sweep-scaling"):
        if theta0 is None:
            section = "trajectory" if subcommand == "trajectory" else "ensemble"
            raise ConfigError(f"missing required key {section}.theta0")
        theta0 = float(theta0)
        if not 0.0 <= theta0 <= math.pi:
            raise ConfigError(f"theta0 must lie in [0, pi], got {theta0!r}")

    m = _get(data, "ensemble", "m", 10000)
    if isinstance(m, bool) or not isinstance(m, int) or m < 1:
        raise ConfigError(f"ensemble.m must be a positive integer, got {m!r}")
    stride = _get(data, "ensemble", "record_stride", 100)
    if isinstance(stride, bool) or not isinstance(stride, int) or stride < 1:
        raise ConfigError(f"ensemble.record_stride must be a positive integer")

    n_points = _get(data, "flowfield", "n_points", 181)
    if isinstance(n_points, bool) or not isinstance(n_points, int) or n_points < 2:
        raise ConfigError("flowfield.n_points must be an integer >= 2")

    return RunConfig(
        subcommand=subcommand,
        seed=seed_val,
        out_format=fmt,
        output_dir=out_dir if out_dir is not None else _get(data, "run", "out_dir", None),
        params=_build_params(data),
        noise=_build_noise(data),
        integrator=_build_integrator(data),
        m=m,
        theta0=theta0,
        record_stride=stride,
        rabi_t_end=_require_number(data, "rabi", "t_end", 1.0),
        flow_n_points=n_points,
        ratios=_build_sequence(data, "ratios", (0.01, 1.0, 100.0)),
        tau_values=_build_sequence(data, "tau_values", (1e-4, 0.25, 1.0)),
        scales=_build_sequence(data, "scales", (1.0, 2.0, 4.0, 8.0)),
        grid=_build_grid(data),
        crystal=_build_crystal(data),
        wigner=_build_wigner_options(data),
        limits=_build_limits(data),
    )


def parse_config(file: str | Path, overrides=(), subcommand: str = "ensemble",
                 **kwargs) -> RunConfig:
    """Load a TOML file, apply key=value overrides, and validate."""
    path = Path(file)
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"config file {path} is not valid TOML: {e}") from e
    data = apply_overrides(data, overrides)
    return resolve_config(subcommand, data, **kwargs)


def config_as_dict(cfg: RunConfig) -> dict:
    """Resolved config as plain JSON-serializable data (for the manifest)."""
    noise: dict[str, Any] = {"kind": type(cfg.noise).__name__}
    if isinstance(cfg.noise, OrnsteinUhlenbeck):
        noise["tau_t"] = cfg.noise.tau_t
    if isinstance(cfg.noise, ConstantField):
        noise["xi"] = cfg.noise.xi
    return {
        "subcommand": cfg.subcommand,
        "seed": cfg.seed,
        "format": cfg.out_format,
        "output_dir": cfg.output_dir,
        "params": {
            "J": cfg.params.J, "G": cfg.params.G, "epsilon": cfg.params.epsilon,
            "n_order": cfg.params.n_order, "omega_rabi": cfg.params.omega_rabi},
        "noise": noise,
        "integrator": {
            "dt": cfg.integrator.dt, "scheme": cfg.integrator.scheme,
            "max_time": cfg.integrator.max_time,
            "pole_epsilon": cfg.integrator.pole_epsilon,
            "renormalize_every_step": cfg.integrator.renormalize_every_step},
        "ensemble": {"m": cfg.m, "theta0": cfg.theta0,
                     "record_stride": cfg.record_stride},
        "rabi": {"t_end": cfg.rabi_t_end},
        "flowfield": {"n_points": cfg.flow_n_points},
        "sweep": {"ratios": list(cfg.ratios), "tau_values": list(cfg.tau_values),
                  "scales": list(cfg.scales)},
        "grid": {"x_min": cfg.grid.x_min, "x_max": cfg.grid.x_max, "nx": cfg.grid.nx,
                 "p_min": cfg.grid.p_min, "p_max": cfg.grid.p_max, "np": cfg.grid.np},
        "crystal": {"m_tot": cfg.crystal.m_tot, "epsilon": cfg.crystal.epsilon,
                    "n_order": cfg.crystal.n_order, "x0": cfg.crystal.x0},
        "wigner": {
            "mode": cfg.wigner.mode, "t_end": cfg.wigner.t_end, "dt": cfg.wigner.dt,
            "renormalize": cfg.wigner.renormalize, "x_mean": cfg.wigner.x_mean,
            "p_mean": cfg.wigner.p_mean, "sigma_x": cfg.wigner.sigma_x,
            "sigma_p": cfg.wigner.sigma_p, "hbar": cfg.wigner.hbar},
        "limits": {
            "order": cfg.limits.order,
            "eps_sequence": list(cfg.limits.eps_sequence),
            "n_sequence": list(cfg.limits.n_sequence),
            "t_end": cfg.limits.t_end},
    }
