"""Two-beam double-slit intensity from independently evolved slit densities.

Each beam spreads by pure ballistic diffusion in its co-moving frame; the
transverse drift enters only as a coordinate shift of the beam center and
through the velocity difference in the interference phase. The total
intensity follows the classical two-wave rule
``p1 + p2 + 2 sqrt(p1 p2) cos(phi)`` with ``phi = m dvx x / hbar``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import analytic_sigma
from .core import Field, GaussianState, Grid1D, PhysicalParams, SlitConfig, grid_spanning
from .errors import DomainTooSmallError, ValidationError
from .stepper import evolve, sample_gaussian_field


@dataclass(frozen=True)
class IntensityMap:
    """Per-snapshot beam densities and their composed total intensity."""

    times: np.ndarray
    x_axis: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    p_total: np.ndarray

    def __post_init__(self):
        t = np.array(self.times, dtype=np.float64)
        x = np.array(self.x_axis, dtype=np.float64)
        shape = (t.size, x.size)
        arrays = {}
        for name in ("p1", "p2", "p_total"):
            a = np.array(getattr(self, name), dtype=np.float64)
            if a.shape != shape:
                raise ValidationError(f"{name} has shape {a.shape}, expected {shape}")
            if np.any(a < 0.0):
                raise ValidationError(f"{name} contains negative intensities")
            a.setflags(write=False)
            arrays[name] = a
        t.setflags(write=False)
        x.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "x_axis", x)
        for name, a in arrays.items():
            object.__setattr__(self, name, a)


def phase(x, dvx: float, params: PhysicalParams):
    """Interference phase mass * dvx * x / hbar; linear and odd in x."""
    out = params.mass * dvx * np.asarray(x, dtype=np.float64) / params.hbar
    return float(out) if np.isscalar(x) else out


def compose_intensity(p1, p2, phi):
    """Classical two-wave intensity p1 + p2 + 2 sqrt(p1 p2) cos(phi).

    Never negative: algebraically the minimum is (sqrt(p1)-sqrt(p2))^2,
    and the one-ulp rounding dip at perfect destructive interference is
    clamped to zero.
    """
    p1_arr = np.asarray(p1, dtype=np.float64)
    p2_arr = np.asarray(p2, dtype=np.float64)
    if np.any(p1_arr < 0.0) or np.any(p2_arr < 0.0):
        raise ValidationError("beam intensities must be non-negative")
    out = p1_arr + p2_arr + 2.0 * np.sqrt(p1_arr * p2_arr) * np.cos(phi)
    out = np.maximum(out, 0.0)
    scalar = np.isscalar(p1) and np.isscalar(p2) and np.isscalar(phi)
    return float(out) if scalar else out


def _beam_states(slits: SlitConfig) -> tuple[GaussianState, GaussianState]:
    half = 0.5 * slits.separation
    return (
        GaussianState(sigma0=slits.sigma0, center=-half),
        GaussianState(sigma0=slits.sigma0, center=+half),
    )


def _check_domain(grid: Grid1D, state: GaussianState, v: float, t_last: float,
                  diffusivity: float, safety_span: float) -> None:
    for t in (0.0, t_last):
        c = state.center + v * t
        reach = safety_span * analytic_sigma(t, state.sigma0, diffusivity)
        if c - reach < grid.x_min or c + reach > grid.x_max:
            raise DomainTooSmallError(
                f"beam from x0={state.center} drifting at {v} needs "
                f"[{c - reach:.4g}, {c + reach:.4g}] at t={t}, grid covers "
                f"[{grid.x_min:.4g}, {grid.x_max:.4g}]"
            )


def _shift(values: np.ndarray, x: np.ndarray, offset: float) -> np.ndarray:
    if offset == 0.0:
        return np.array(values, dtype=np.float64)
    return np.interp(x - offset, x, values, left=0.0, right=0.0)


def simulate_double_slit(
    slits: SlitConfig,
    grid: Grid1D,
    params: PhysicalParams,
    snapshot_times,
    *,
    safety_span: float = 5.0,
    leak_threshold: float = 1e-6,
) -> IntensityMap:
    """Evolve both slit beams and compose the total intensity per snapshot.

    Beams evolve in their co-moving frames on the shared grid; the drift
    ``v_i * t`` is applied afterwards as a linear-interpolation shift.
    Both per-beam densities are kept in the output for diagnostics; each
    is normalized to unit mass, so the composed total is not.
    """
    states = _beam_states(slits)
    drifts = (slits.v1, slits.v2)
    t_last = float(np.max(np.asarray(snapshot_times, dtype=np.float64)))
    for state, v in zip(states, drifts):
        _check_domain(grid, state, v, t_last, params.diffusivity, safety_span)

    beams: list[np.ndarray] = []
    times: np.ndarray | None = None
    for state, v in zip(states, drifts):
        initial = sample_gaussian_field(state, grid)
        snaps, _ = evolve(
            initial, grid, state, params, snapshot_times, leak_threshold=leak_threshold
        )
        if times is None:
            times = np.array([s.time for s in snaps])
        rows = np.stack([_shift(s.values, grid.x, v * s.time) for s in snaps])
        beams.append(rows)

    phi = phase(grid.x, slits.dvx, params)
    p_total = np.stack([compose_intensity(r1, r2, phi) for r1, r2 in zip(*beams)])
    return IntensityMap(
        times=times, x_axis=grid.x, p1=beams[0], p2=beams[1], p_total=p_total
    )


def required_half_width(
    slits: SlitConfig, params: PhysicalParams, t_final: float, safety_span: float
) -> float:
    """Half-width around x = 0 holding both drifted, spread beams."""
    if t_final < 0.0:
        raise ValidationError(f"t_final must be >= 0, got {t_final!r}")
    half = 0.5 * slits.separation
    need = 0.0
    for c0, v in ((-half, slits.v1), (half, slits.v2)):
        for t in (0.0, t_final):
            reach = safety_span * analytic_sigma(t, slits.sigma0, params.diffusivity)
            need = max(need, abs(c0 + v * t) + reach)
    return need


def auto_grid_double_slit(
    slits: SlitConfig,
    params: PhysicalParams,
    t_final: float,
    points_per_sigma0: int = 16,
    safety_span: float = 10.0,
    *,
    dt: float,
    nx_cap: int | None = None,
) -> Grid1D:
    """Grid centered between the slits, wide enough for both drifted beams."""
    dx = slits.sigma0 / int(points_per_sigma0)
    need = required_half_width(slits, params, t_final, safety_span)
    kwargs = {} if nx_cap is None else {"nx_cap": nx_cap}
    return grid_spanning(0.0, need, dx, dt=dt, t_final=t_final, **kwargs)


def detect_fringe_maxima(
    x: np.ndarray,
    p1: np.ndarray,
    p2: np.ndarray,
    p_total: np.ndarray,
    *,
    envelope_floor: float = 1e-9,
) -> np.ndarray:
    """Positions of constructive-interference maxima in one snapshot.

    Works on the envelope-normalized cross term
    ``(p_total - p1 - p2) / (2 sqrt(p1 p2))``, which recovers the phase
    cosine; maxima of the raw cross term are dragged toward the envelope
    peak and would not land on the cosine's crests. Cells where the
    envelope is below ``envelope_floor`` of its maximum are ignored.
    """
    envelope = 2.0 * np.sqrt(p1 * p2)
    peak = envelope.max()
    if peak <= 0.0:
        return np.empty(0)
    valid = envelope > envelope_floor * peak
    ratio = np.where(valid, (p_total - p1 - p2) / np.where(valid, envelope, 1.0), np.nan)
    ok = valid[1:-1] & valid[:-2] & valid[2:]
    rising = ratio[1:-1] > ratio[:-2]
    falling = ratio[1:-1] > ratio[2:]
    hits = np.nonzero(ok & rising & falling)[0] + 1
    return x[hits]


def fringe_spacing(params: PhysicalParams, dvx: float) -> float:
    """Distance between adjacent constructive maxima, 2 pi hbar / (m dvx)."""
    if dvx == 0.0:
        raise ValidationError("fringe spacing is undefined for dvx = 0")
    return 2.0 * math.pi * params.hbar / (params.mass * abs(dvx))
