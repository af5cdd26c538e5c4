# run_config.py
"""
Run configuration loader.

Configuration files are TOML with the sections [grid], [phys], [init],
[time], [integrator] and [diagnostics]. Every section and key is optional
and falls back to wnls.config.settings; unknown sections or keys are
rejected. Every error names the offending key path, e.g. "grid.n".

Example:
    [grid]
    n = 128
    half_width = 10.0

    [phys]
    b = 0.5

    [init]
    kind = "gaussian"
    amplitude = 0.5

    [time]
    dt = 1e-3
    t_final = 1.0
"""

from __future__ import annotations

import logging
import tomllib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Tuple

from ..calculations import profiles
from ..calculations.errors import ConfigError, WnlsError
from ..calculations.evolve import EvolveConfig, Integrator
from ..calculations.functionals import moser_sequence
from ..calculations.grid import Field, GridSpec, make_grid
from ..config import settings
from .snapshot import load_snapshot

logger = logging.getLogger(__name__)

INIT_KINDS = ("gaussian", "ring", "plateau", "moser", "random", "file")
MONITOR_NAMES = ("localized_mass", "concentration", "scattering")


@dataclass(frozen=True)
class GridConfig:
    n: int = settings.DEFAULT_GRID_POINTS
    half_width: float = settings.DEFAULT_HALF_WIDTH


@dataclass(frozen=True)
class PhysConfig:
    b: float = settings.DEFAULT_B


@dataclass(frozen=True)
class InitConfig:
    kind: str = "gaussian"
    amplitude: float = settings.DEFAULT_AMPLITUDE
    width: float = settings.DEFAULT_WIDTH
    center: Tuple[float, float] = (0.0, 0.0)
    radius: float = 2.0
    n_param: float = 16.0
    seed: int = settings.DEFAULT_SEED
    path: str | None = None


@dataclass(frozen=True)
class TimeConfig:
    dt: float = settings.DEFAULT_DT
    t_final: float = settings.DEFAULT_T_FINAL
    snapshot_stride: int = settings.DEFAULT_SNAPSHOT_STRIDE


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = Integrator.STRANG.value
    picard_iters: int = settings.DEFAULT_PICARD_ITERS


@dataclass(frozen=True)
class DiagnosticsConfig:
    monitors: Tuple[str, ...] = MONITOR_NAMES
    S: float = settings.DEFAULT_LOCALIZED_S
    S_prime: float = settings.DEFAULT_LOCALIZED_S_PRIME
    ensemble_size: int = settings.DEFAULT_ENSEMBLE_SIZE
    probe_T: float = settings.DEFAULT_PROBE_T


@dataclass(frozen=True)
class RunConfig:
    grid: GridConfig = field(default_factory=GridConfig)
    phys: PhysConfig = field(default_factory=PhysConfig)
    init: InitConfig = field(default_factory=InitConfig)
    time: TimeConfig = field(default_factory=TimeConfig)
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    diagnostics: DiagnosticsConfig = field(default_factory=DiagnosticsConfig)

    def make_grid(self) -> GridSpec:
        return make_grid(self.grid.n, self.grid.half_width)

    def evolve_config(self) -> EvolveConfig:
        return EvolveConfig(
            dt=self.time.dt,
            t_final=self.time.t_final,
            integrator=Integrator(self.integrator.method),
            picard_iters=self.integrator.picard_iters,
            snapshot_stride=self.time.snapshot_stride,
        )


SECTIONS = {
    "grid": GridConfig,
    "phys": PhysConfig,
    "init": InitConfig,
    "time": TimeConfig,
    "integrator": IntegratorConfig,
    "diagnostics": DiagnosticsConfig,
}


# ----------------------------------------------------------------------
# Typed readers
# ----------------------------------------------------------------------

def _as_int(key: str, value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(key, f"expected integer, got {type(value).__name__}")
    return value


def _as_float(key: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(key, f"expected number, got {type(value).__name__}")
    return float(value)


def _as_str(key: str, value: Any) -> str:
    if not isinstance(value, str):
        raise ConfigError(key, f"expected string, got {type(value).__name__}")
    return value


def _as_center(key: str, value: Any) -> Tuple[float, float]:
    if not isinstance(value, list) or len(value) != 2:
        raise ConfigError(key, "expected a list of two numbers")
    return (_as_float(f"{key}[0]", value[0]), _as_float(f"{key}[1]", value[1]))


def _as_monitors(key: str, value: Any) -> Tuple[str, ...]:
    if not isinstance(value, list):
        raise ConfigError(key, "expected a list of monitor names")
    names = tuple(_as_str(f"{key}[{i}]", v) for i, v in enumerate(value))
    for i, name in enumerate(names):
        if name not in MONITOR_NAMES:
            raise ConfigError(f"{key}[{i}]", f"unknown monitor {name!r} (expected one of {', '.join(MONITOR_NAMES)})")
    return names


READERS = {
    "grid": {"n": _as_int, "half_width": _as_float},
    "phys": {"b": _as_float},
    "init": {
        "kind": _as_str,
        "amplitude": _as_float,
        "width": _as_float,
        "center": _as_center,
        "radius": _as_float,
        "n_param": _as_float,
        "seed": _as_int,
        "path": _as_str,
    },
    "time": {"dt": _as_float, "t_final": _as_float, "snapshot_stride": _as_int},
    "integrator": {"method": _as_str, "picard_iters": _as_int},
    "diagnostics": {
        "monitors": _as_monitors,
        "S": _as_float,
        "S_prime": _as_float,
        "ensemble_size": _as_int,
        "probe_T": _as_float,
    },
}


def _read_section(name: str, raw: Any) -> Dict[str, Any]:
    if not isinstance(raw, dict):
        raise ConfigError(name, "expected a section table")
    readers = READERS[name]
    values = {}
    for key, value in raw.items():
        path = f"{name}.{key}"
        if key not in readers:
            raise ConfigError(path, "unknown key")
        values[key] = readers[key](path, value)
    return values


# ----------------------------------------------------------------------
# Constraints
# ----------------------------------------------------------------------

def _validate(cfg: RunConfig) -> None:
    try:
        make_grid(cfg.grid.n, 1.0)
    except WnlsError as exc:
        raise ConfigError("grid.n", str(exc)) from exc
    if not 0.0 < cfg.grid.half_width < float("inf"):
        raise ConfigError("grid.half_width", f"must be positive and finite, got {cfg.grid.half_width}")

    if cfg.integrator.method not in {i.value for i in Integrator}:
        raise ConfigError("integrator.method", f"unknown integrator {cfg.integrator.method!r} (expected strang or picard)")
    if not 0.0 < cfg.phys.b < 1.0:
        raise ConfigError("phys.b", f"out of PDE range (0,1): {cfg.phys.b}")

    if cfg.init.kind not in INIT_KINDS:
        raise ConfigError("init.kind", f"unknown kind {cfg.init.kind!r} (expected one of {', '.join(INIT_KINDS)})")
    if cfg.init.kind == "file" and not cfg.init.path:
        raise ConfigError("init.path", "required when init.kind = 'file'")
    if cfg.init.width <= 0:
        raise ConfigError("init.width", f"must be positive, got {cfg.init.width}")
    if cfg.init.radius < 0:
        raise ConfigError("init.radius", f"must be nonnegative, got {cfg.init.radius}")
    if cfg.init.n_param < 2:
        raise ConfigError("init.n_param", f"must be >= 2, got {cfg.init.n_param}")

    if cfg.time.dt <= 0:
        raise ConfigError("time.dt", f"must be positive, got {cfg.time.dt}")
    if cfg.time.t_final < cfg.time.dt:
        raise ConfigError("time.t_final", f"must be >= time.dt, got {cfg.time.t_final}")
    if cfg.time.snapshot_stride < 1:
        raise ConfigError("time.snapshot_stride", f"must be >= 1, got {cfg.time.snapshot_stride}")
    if cfg.integrator.picard_iters < 2:
        raise ConfigError("integrator.picard_iters", f"must be >= 2, got {cfg.integrator.picard_iters}")

    if cfg.diagnostics.S <= 0:
        raise ConfigError("diagnostics.S", f"must be positive, got {cfg.diagnostics.S}")
    if cfg.diagnostics.S_prime <= 0:
        raise ConfigError("diagnostics.S_prime", f"must be positive, got {cfg.diagnostics.S_prime}")
    if cfg.diagnostics.ensemble_size < 1:
        raise ConfigError("diagnostics.ensemble_size", f"must be >= 1, got {cfg.diagnostics.ensemble_size}")
    if cfg.diagnostics.probe_T <= 0:
        raise ConfigError("diagnostics.probe_T", f"must be positive, got {cfg.diagnostics.probe_T}")


def parse_config(text: str) -> RunConfig:
    """
    Parse and validate configuration text.

    Args:
        text: TOML document

    Returns:
        Validated RunConfig

    Raises:
        ConfigError: syntax error, unknown key, type mismatch or constraint
            violation; the message starts with the key path
    """
    try:
        document = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("<document>", f"invalid TOML: {exc}") from exc

    sections = {}
    for name, raw in document.items():
        if name not in SECTIONS:
            raise ConfigError(name, "unknown section")
        sections[name] = SECTIONS[name](**_read_section(name, raw))

    cfg = RunConfig(**sections)
    _validate(cfg)
    logger.debug(f"Parsed run configuration: {cfg}")
    return cfg


def build_initial_field(cfg: RunConfig) -> Field:
    """Initial data described by the [init] section, on the configured grid."""
    grid = cfg.make_grid()
    init = cfg.init
    if init.kind == "gaussian":
        return profiles.gaussian(grid, init.amplitude, init.width, init.center)
    if init.kind == "ring":
        return profiles.ring(grid, init.amplitude, init.radius, init.width)
    if init.kind == "plateau":
        return profiles.plateau(grid, init.amplitude)
    if init.kind == "moser":
        return moser_sequence(init.n_param, grid).scaled(init.amplitude)
    if init.kind == "random":
        return profiles.random_band_limited(grid, seed=init.seed).scaled(init.amplitude)
    u, _ = load_snapshot(init.path)
    if u.grid != grid:
        raise ConfigError("init.path", f"snapshot grid (n={u.grid.n}, L={u.grid.half_width}) differs from [grid]")
    return u


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("--config", f"cannot read {path}: {exc}") from exc
    return parse_config(text)
