"""Domain types and validated constructors shared by every module.

All types are immutable after construction and safe to share between
threads. Arrays held by :class:`Field` and :class:`TrajectorySet` are
marked read-only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ResourceLimitError, ValidationError

#: Default upper bound on grid nodes; spreading is linear in t at late times,
#: so an over-long run would otherwise exhaust memory instead of failing fast.
DEFAULT_NX_CAP = 2**22


def _require_positive(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise ValidationError(f"{name} must be positive and finite, got {value!r}")
    return value


def _require_non_negative(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value < 0.0:
        raise ValidationError(f"{name} must be >= 0 and finite, got {value!r}")
    return value


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PhysicalParams:
    """Physical constants of a run; diffusivity is derived, never set.

    ``diffusivity = hbar / (2 * mass)`` holds exactly; it is the constant
    spreading diffusivity, distinct from the time-dependent diffusion
    coefficient that drives the stepper.
    """

    hbar: float
    mass: float
    diffusivity: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "hbar", _require_positive("hbar", self.hbar))
        object.__setattr__(self, "mass", _require_positive("mass", self.mass))
        object.__setattr__(self, "diffusivity", self.hbar / (2.0 * self.mass))


def make_physical_params(hbar: float, mass: float) -> PhysicalParams:
    """Validate (hbar, mass) and derive the diffusivity hbar/(2*mass)."""
    return PhysicalParams(hbar=hbar, mass=mass)


@dataclass(frozen=True)
class GeneralDiffusionLaw:
    """Power-law diffusion coefficient k * t**alpha."""

    k: float
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "k", _require_non_negative("k", self.k))
        object.__setattr__(self, "alpha", _require_non_negative("alpha", self.alpha))

    @classmethod
    def ballistic(cls, sigma0: float, diffusivity: float) -> "GeneralDiffusionLaw":
        """The alpha=1 specialization with k = diffusivity**2 / sigma0**2."""
        sigma0 = _require_positive("sigma0", sigma0)
        diffusivity = _require_positive("diffusivity", diffusivity)
        return cls(k=diffusivity**2 / sigma0**2, alpha=1.0)

    def coefficient(self, t: float) -> float:
        return self.k * float(t) ** self.alpha


@dataclass(frozen=True)
class GaussianState:
    """Initial Gaussian packet: standard deviation at t=0 and its mean."""

    sigma0: float
    center: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "sigma0", _require_positive("sigma0", self.sigma0))
        object.__setattr__(self, "center", float(self.center))


@dataclass(frozen=True)
class Grid1D:
    """Uniform spatial mesh plus the nominal (macro) time step."""

    x_min: float
    dx: float
    nx: int
    dt: float
    n_steps: int

    def __post_init__(self):
        object.__setattr__(self, "x_min", float(self.x_min))
        object.__setattr__(self, "dx", _require_positive("dx", self.dx))
        object.__setattr__(self, "dt", _require_positive("dt", self.dt))
        object.__setattr__(self, "nx", int(self.nx))
        object.__setattr__(self, "n_steps", int(self.n_steps))
        if self.nx < 3:
            raise ValidationError(f"nx must be >= 3, got {self.nx}")
        if self.n_steps < 1:
            raise ValidationError(f"n_steps must be >= 1, got {self.n_steps}")

    @property
    def x_max(self) -> float:
        return self.x_min + (self.nx - 1) * self.dx

    @property
    def t_final(self) -> float:
        return self.n_steps * self.dt

    @cached_property
    def x(self) -> np.ndarray:
        """Node positions, read-only."""
        return _readonly(self.x_min + self.dx * np.arange(self.nx))


@dataclass(frozen=True)
class Field:
    """Non-negative density samples on the grid nodes at one instant."""

    time: float
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "time", float(self.time))
        v = np.array(self.values, dtype=np.float64)
        if v.ndim != 1 or v.size < 3:
            raise ValidationError("field values must be a 1-d array with >= 3 nodes")
        if not np.all(np.isfinite(v)):
            raise ValidationError("field values must be finite")
        if np.any(v < 0.0):
            raise ValidationError("field values must be non-negative")
        object.__setattr__(self, "values", _readonly(v))

    def mass(self, dx: float) -> float:
        """Discrete mass sum(values) * dx."""
        return float(self.values.sum() * dx)


@dataclass(frozen=True)
class SlitConfig:
    """Two Gaussian slits: geometry, per-slit width, and beam drifts.

    ``dvx`` is derived as ``v1 - v2``; it is the only place the beam
    kinematics enter the interference phase.
    """

    separation: float
    sigma0: float
    v1: float
    v2: float
    dvx: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "separation", _require_positive("separation", self.separation))
        object.__setattr__(self, "sigma0", _require_positive("sigma0", self.sigma0))
        object.__setattr__(self, "v1", float(self.v1))
        object.__setattr__(self, "v2", float(self.v2))
        object.__setattr__(self, "dvx", self.v1 - self.v2)


@dataclass(frozen=True)
class TrajectorySet:
    """Flux lines: per-quantile positions over a shared time axis.

    ``paths[i, k]`` is the position of quantile ``quantiles[i]`` at
    ``times[k]``. Construction rejects crossing paths.
    """

    quantiles: np.ndarray
    times: np.ndarray
    paths: np.ndarray

    def __post_init__(self):
        q = np.array(self.quantiles, dtype=np.float64)
        t = np.array(self.times, dtype=np.float64)
        p = np.array(self.paths, dtype=np.float64)
        if q.ndim != 1 or q.size < 1:
            raise ValidationError("quantiles must be a non-empty 1-d array")
        if np.any(q <= 0.0) or np.any(q >= 1.0):
            raise ValidationError("quantiles must lie strictly inside (0, 1)")
        if np.any(np.diff(q) <= 0.0):
            raise ValidationError("quantiles must be strictly increasing")
        if p.shape != (q.size, t.size):
            raise ValidationError(
                f"paths shape {p.shape} does not match (n_quantiles, n_times) = {(q.size, t.size)}"
            )
        if q.size > 1 and np.any(np.diff(p, axis=0) < 0.0):
            raise ValidationError("flux lines cross: positions are not ordered by quantile")
        object.__setattr__(self, "quantiles", _readonly(q))
        object.__setattr__(self, "times", _readonly(t))
        object.__setattr__(self, "paths", _readonly(p))


def auto_grid(
    state: GaussianState,
    params: PhysicalParams,
    t_final: float,
    points_per_sigma0: int = 16,
    safety_span: float = 10.0,
    *,
    dt: float,
    nx_cap: int = DEFAULT_NX_CAP,
) -> Grid1D:
    """Size a grid around the packet for a run of length ``t_final``.

    The spacing is ``sigma0 / points_per_sigma0`` and the half-width covers
    ``safety_span`` final standard deviations on each side of the center.
    The node count is forced odd so the center falls exactly on a node.
    """
    t_final = _require_non_negative("t_final", t_final)
    points_per_sigma0 = int(points_per_sigma0)
    if points_per_sigma0 < 8:
        raise ValidationError(f"points_per_sigma0 must be >= 8, got {points_per_sigma0}")
    if safety_span < 5.0:
        raise ValidationError(f"safety_span must be >= 5, got {safety_span}")
    dx = state.sigma0 / points_per_sigma0
    # late-time spread: sigma(t) = sigma0 * sqrt(1 + (D t / sigma0^2)^2)
    u = params.diffusivity * t_final / state.sigma0**2
    half_min = safety_span * state.sigma0 * math.sqrt(1.0 + u * u)
    return grid_spanning(state.center, half_min, dx, dt=dt, t_final=t_final, nx_cap=nx_cap)


def grid_spanning(
    center: float,
    half_width_min: float,
    dx: float,
    *,
    dt: float,
    t_final: float,
    nx_cap: int = DEFAULT_NX_CAP,
) -> Grid1D:
    """Build an odd-node grid centered on ``center`` covering the given half-width."""
    dx = _require_positive("dx", dx)
    dt = _require_positive("dt", dt)
    half_width_min = _require_positive("half_width_min", half_width_min)
    n_half = max(1, math.ceil(half_width_min / dx))
    nx = 2 * n_half + 1
    if nx > nx_cap:
        raise ResourceLimitError(
            f"grid would need {nx} nodes (cap {nx_cap}); "
            "coarsen dx, shorten t_final, or lower safety_span"
        )
    n_steps = max(1, math.ceil(t_final / dt - 1e-9))
    return Grid1D(x_min=center - n_half * dx, dx=dx, nx=nx, dt=dt, n_steps=n_steps)
