"""Run configuration: INI-style sections, strictly validated.

Unknown sections or keys are hard errors so a typo can never silently
fall back to a default. The slit velocities may be given either as the
pair (v1, v2) or as a single symmetric split dvx, not both.
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass
from pathlib import Path

from .core import (
    DEFAULT_NX_CAP,
    GaussianState,
    Grid1D,
    PhysicalParams,
    SlitConfig,
    grid_spanning,
    make_physical_params,
)
from .errors import ConfigError
from .analytic import analytic_sigma

# section -> key -> type tag ("float", "int", "bool", "floats", "str")
SCHEMA: dict[str, dict[str, str]] = {
    "physical": {"hbar": "float", "mass": "float"},
    "packet": {"sigma0": "float", "center": "float"},
    "grid": {
        "dx": "float",
        "points_per_sigma0": "int",
        "dt": "float",
        "t_final": "float",
        "safety_span": "float",
        "nx_cap": "int",
    },
    "slits": {"separation": "float", "v1": "float", "v2": "float", "dvx": "float"},
    "trajectories": {"quantiles": "floats", "v_y": "float"},
    "output": {
        "directory": "str",
        "snapshot_times": "floats",
        "normalize_total": "bool",
        "sigma_rel_tol": "float",
        "homothety_tol": "float",
        "fringe_cell_tol": "float",
    },
    "sweep": {},  # validated separately: command plus dotted config keys
}

_BOOL_WORDS = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}


@dataclass(frozen=True)
class RunConfig:
    """Validated contents of one configuration file."""

    origin: str
    params: PhysicalParams
    state: GaussianState
    dx: float
    dt: float
    t_final: float
    safety_span: float
    nx_cap: int
    slits: SlitConfig | None
    quantiles: tuple[float, ...]
    v_y: float
    directory: str | None
    snapshot_times: tuple[float, ...]
    normalize_total: bool
    sigma_rel_tol: float | None
    homothety_tol: float | None
    fringe_cell_tol: float | None


def load_raw(path) -> dict[str, dict[str, str]]:
    """Read an INI file into nested dicts, rejecting unknown sections/keys."""
    path = Path(path)
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # keep keys case-sensitive
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    raw: dict[str, dict[str, str]] = {}
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(f"{path}: unknown section [{section}]")
        raw[section] = dict(parser.items(section))
        if section == "sweep":
            continue
        for key in raw[section]:
            if key not in SCHEMA[section]:
                raise ConfigError(f"{path}: unknown key [{section}] {key}")
    return raw


def _parse(kind: str, text: str, where: str):
    try:
        if kind == "float":
            value = float(text)
            if not math.isfinite(value):
                raise ValueError("not finite")
            return value
        if kind == "int":
            return int(text)
        if kind == "bool":
            word = text.strip().lower()
            if word not in _BOOL_WORDS:
                raise ValueError(f"expected true/false, got {text!r}")
            return _BOOL_WORDS[word]
        if kind == "floats":
            items = [s for s in (p.strip() for p in text.split(",")) if s]
            if not items:
                raise ValueError("empty list")
            return tuple(float(s) for s in items)
        return text.strip()
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _get(raw, section, key, default=None):
    return raw.get(section, {}).get(key, default)


def build_config(raw: dict[str, dict[str, str]], origin: str) -> RunConfig:
    """Type-check the raw key/value maps and assemble a RunConfig."""

    def val(section, key, default=None):
        text = _get(raw, section, key)
        if text is None:
            return default
        return _parse(SCHEMA[section][key], text, f"{origin}: [{section}] {key}")

    params = make_physical_params(val("physical", "hbar", 1.0), val("physical", "mass", 1.0))
    state = GaussianState(sigma0=val("packet", "sigma0", 1.0), center=val("packet", "center", 0.0))

    dt = val("grid", "dt")
    t_final = val("grid", "t_final")
    if dt is None or t_final is None:
        raise ConfigError(f"{origin}: [grid] dt and t_final are required")
    if dt <= 0.0 or t_final < 0.0:
        raise ConfigError(f"{origin}: [grid] needs dt > 0 and t_final >= 0")

    dx = val("grid", "dx")
    pps = val("grid", "points_per_sigma0")
    if dx is not None and pps is not None:
        raise ConfigError(f"{origin}: [grid] give dx or points_per_sigma0, not both")
    if dx is None:
        dx = state.sigma0 / (pps if pps is not None else 16)
    if dx <= 0.0:
        raise ConfigError(f"{origin}: [grid] dx must be positive")

    safety_span = val("grid", "safety_span", 10.0)
    if safety_span < 5.0:
        raise ConfigError(f"{origin}: [grid] safety_span must be >= 5")
    nx_cap = val("grid", "nx_cap", DEFAULT_NX_CAP)

    slits = None
    if "slits" in raw:
        separation = val("slits", "separation")
        if separation is None:
            raise ConfigError(f"{origin}: [slits] separation is required")
        v1, v2, dvx = val("slits", "v1"), val("slits", "v2"), val("slits", "dvx")
        if dvx is not None:
            if v1 is not None or v2 is not None:
                raise ConfigError(f"{origin}: [slits] give either dvx or v1/v2, not both")
            v1, v2 = 0.5 * dvx, -0.5 * dvx
        else:
            v1 = 0.0 if v1 is None else v1
            v2 = 0.0 if v2 is None else v2
        slits = SlitConfig(separation=separation, sigma0=state.sigma0, v1=v1, v2=v2)

    quantiles = val("trajectories", "quantiles", tuple(i / 10 for i in range(1, 10)))
    if any(not (0.0 < q < 1.0) for q in quantiles):
        raise ConfigError(f"{origin}: [trajectories] quantiles must lie in (0, 1)")
    if any(b <= a for a, b in zip(quantiles, quantiles[1:])):
        raise ConfigError(f"{origin}: [trajectories] quantiles must be strictly increasing")

    snapshot_times = val("output", "snapshot_times")
    if snapshot_times is None:
        count = 5
        snapshot_times = tuple(sorted({t_final * i / (count - 1) for i in range(count)}))
    if any(t < 0.0 for t in snapshot_times):
        raise ConfigError(f"{origin}: [output] snapshot_times must be >= 0")
    if any(b < a for a, b in zip(snapshot_times, snapshot_times[1:])):
        raise ConfigError(f"{origin}: [output] snapshot_times must be sorted")
    if snapshot_times and max(snapshot_times) > t_final * (1.0 + 1e-12):
        raise ConfigError(f"{origin}: [output] snapshot_times exceed t_final")

    return RunConfig(
        origin=origin,
        params=params,
        state=state,
        dx=dx,
        dt=dt,
        t_final=t_final,
        safety_span=safety_span,
        nx_cap=nx_cap,
        slits=slits,
        quantiles=quantiles,
        v_y=val("trajectories", "v_y", 1.0),
        directory=val("output", "directory"),
        snapshot_times=snapshot_times,
        normalize_total=val("output", "normalize_total", False),
        sigma_rel_tol=val("output", "sigma_rel_tol"),
        homothety_tol=val("output", "homothety_tol"),
        fringe_cell_tol=val("output", "fringe_cell_tol"),
    )


def load_config(path) -> RunConfig:
    return build_config(load_raw(path), str(path))


def single_beam_grid(cfg: RunConfig) -> Grid1D:
    """Grid for a single-packet run, sized from the final spread."""
    half = cfg.safety_span * analytic_sigma(cfg.t_final, cfg.state.sigma0, cfg.params.diffusivity)
    return grid_spanning(
        cfg.state.center, half, cfg.dx, dt=cfg.dt, t_final=cfg.t_final, nx_cap=cfg.nx_cap
    )


def double_slit_grid(cfg: RunConfig) -> Grid1D:
    """Grid for a two-slit run, covering both drifted beams."""
    if cfg.slits is None:
        raise ConfigError(f"{cfg.origin}: [slits] section is required for this run")
    from .interference import required_half_width

    need = required_half_width(cfg.slits, cfg.params, cfg.t_final, cfg.safety_span)
    return grid_spanning(0.0, need, cfg.dx, dt=cfg.dt, t_final=cfg.t_final, nx_cap=cfg.nx_cap)
