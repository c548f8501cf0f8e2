"""Flat ``key = value`` experiment configuration.

Example::

    mode = sweep-kappa
    output_dir = results
    system.J = 1.0
    system.h1 = 0.25
    system.gamma_plus = 0.05          # scalar applies to both sites
    integrator.dt = 0.05
    sweep.kappa_list = 0,50,100,150,200
    sweep.field_grid = 0:1.0:0.025    # start:stop:step, stop included

Lines starting with ``#`` and trailing ``# ...`` comments are ignored.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .integrator import IntegratorConfig
from .operators import SystemParams

MODES = ("simulate", "sweep-kappa", "sweep-field", "verify")
DEFAULT_KAPPAS = (0.0, 50.0, 100.0, 150.0, 200.0)


class ConfigError(ValueError):
    pass


def default_field_grid() -> tuple[float, ...]:
    return tuple(round(0.025 * i, 12) for i in range(41))


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str = "simulate"
    system: SystemParams = field(default_factory=SystemParams)
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    kappa_list: tuple[float, ...] = DEFAULT_KAPPAS
    field_grid: tuple[float, ...] = field(default_factory=default_field_grid)
    t_eval: float | None = None
    output_dir: str = "output"
    seed: int = 20240601

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}; expected one of {', '.join(MODES)}")
        object.__setattr__(self, "kappa_list", tuple(float(k) for k in self.kappa_list))
        object.__setattr__(self, "field_grid", tuple(float(h) for h in self.field_grid))
        if self.mode in ("simulate", "sweep-kappa", "sweep-field") and not self.kappa_list:
            raise ConfigError("kappa_list must not be empty")
        if any(b <= a for a, b in zip(self.field_grid, self.field_grid[1:])):
            raise ConfigError("field_grid must be strictly increasing")
        if self.mode == "sweep-field" and not self.field_grid:
            raise ConfigError("field_grid must not be empty")
        if self.t_eval is not None and not 0 < self.t_eval <= self.integrator.t_max * (1 + 1e-12):
            raise ConfigError(f"t_eval={self.t_eval} must lie in (0, t_max={self.integrator.t_max}]")

    @property
    def steady_state_time(self) -> float:
        """Readout time for steady-state quantities: t_eval if set, else t_max."""
        return self.integrator.t_max if self.t_eval is None else self.t_eval


_SYSTEM_SCALARS = ("J", "h1", "h2", "g1", "g2")
_SYSTEM_PAIRS = ("gamma_plus", "eps_plus", "kappa", "gamma_minus", "eps_minus")
_INTEGRATOR_KEYS = {"dt": float, "t_max": float, "record_stride": int, "cp_tol": float}


def _fmt(x: float) -> str:
    return repr(float(x))


def _floats(text: str) -> tuple[float, ...]:
    text = text.strip()
    if not text:
        return ()
    if ":" in text:
        parts = [float(p) for p in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise ConfigError(f"range must be start:stop:step with step > 0, got {text!r}")
        start, stop, step = parts
        n = int(math.floor((stop - start) / step + 1e-9))
        return tuple(round(start + i * step, 12) for i in range(n + 1))
    return tuple(float(p) for p in text.split(","))


def serialize(cfg: ExperimentConfig) -> str:
    lines = [
        f"mode = {cfg.mode}",
        f"output_dir = {cfg.output_dir}",
        f"seed = {cfg.seed}",
    ]
    s = cfg.system
    for key in _SYSTEM_SCALARS:
        lines.append(f"system.{key} = {_fmt(getattr(s, key))}")
    for key in _SYSTEM_PAIRS:
        lines.append(f"system.{key} = {','.join(_fmt(v) for v in getattr(s, key))}")
    for key in _INTEGRATOR_KEYS:
        value = getattr(cfg.integrator, key)
        lines.append(f"integrator.{key} = {value if key == 'record_stride' else _fmt(value)}")
    lines.append(f"sweep.kappa_list = {','.join(_fmt(k) for k in cfg.kappa_list)}")
    lines.append(f"sweep.field_grid = {','.join(_fmt(h) for h in cfg.field_grid)}")
    lines.append(f"sweep.t_eval = {'' if cfg.t_eval is None else _fmt(cfg.t_eval)}")
    return "\n".join(lines) + "\n"


def parse_pairs(text: str) -> list[tuple[str, str]]:
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        pairs.append((key, value))
    return pairs


def apply(cfg: ExperimentConfig, pairs) -> ExperimentConfig:
    """Return ``cfg`` with each (key, value) override applied in order."""
    top: dict = {}
    system: dict = {}
    integ: dict = {}
    for key, value in pairs:
        try:
            section, _, name = key.partition(".")
            if not name:
                if key == "mode":
                    top["mode"] = value
                elif key == "output_dir":
                    top["output_dir"] = value
                elif key == "seed":
                    top["seed"] = int(value)
                else:
                    raise ConfigError(f"unknown key {key!r}")
            elif section == "system":
                if name in _SYSTEM_SCALARS:
                    system[name] = float(value)
                elif name == "h":
                    system["h1"] = system["h2"] = float(value)
                elif name in _SYSTEM_PAIRS:
                    vals = _floats(value)
                    if len(vals) not in (1, 2):
                        raise ConfigError(f"{key} takes one or two values")
                    system[name] = vals[0] if len(vals) == 1 else vals
                else:
                    raise ConfigError(f"unknown key {key!r}")
            elif section == "integrator":
                if name not in _INTEGRATOR_KEYS:
                    raise ConfigError(f"unknown key {key!r}")
                integ[name] = _INTEGRATOR_KEYS[name](value)
            elif section == "sweep":
                if name == "kappa_list":
                    top["kappa_list"] = _floats(value)
                elif name == "field_grid":
                    top["field_grid"] = _floats(value)
                elif name == "t_eval":
                    top["t_eval"] = float(value) if value else None
                else:
                    raise ConfigError(f"unknown key {key!r}")
            else:
                raise ConfigError(f"unknown key {key!r}")
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {value!r} ({exc})") from exc
    try:
        new_system = dataclasses.replace(cfg.system, **system)
        new_integ = dataclasses.replace(cfg.integrator, **integ)
        return dataclasses.replace(cfg, system=new_system, integrator=new_integ, **top)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def parse(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    return apply(base or ExperimentConfig(), parse_pairs(text))


def load(path, overrides=(), base: ExperimentConfig | None = None) -> ExperimentConfig:
    cfg = base or ExperimentConfig()
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        cfg = parse(text, cfg)
    pairs = []
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override must be key=value, got {item!r}")
        k, v = item.split("=", 1)
        pairs.append((k.strip(), v.strip()))
    return apply(cfg, pairs)


def lambda_over_gamma(system: SystemParams, kappa: float) -> float:
    g = system.g1
    return g * g / 16.0 * system.eps_plus[0] / system.gamma_plus[0] * kappa


def with_kappa(system: SystemParams, kappa: float) -> SystemParams:
    return dataclasses.replace(system, kappa=(kappa, kappa))


def with_field(system: SystemParams, h_over_j: float) -> SystemParams:
    h = float(np.float64(h_over_j) * system.J)
    return dataclasses.replace(system, h1=h, h2=h)
