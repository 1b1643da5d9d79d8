"""Explicit finite-difference integration of the ballistic diffusion equation.

The update rule is the standard explicit stencil
``P[x] <- P[x] + nu * (P[x+1] - 2 P[x] + P[x-1])`` with the dimensionless
coefficient ``nu = D_t * dt / dx**2`` evaluated at the end time of each
(sub)step. Because the diffusion coefficient grows linearly in time, any
fixed step eventually violates the von Neumann bound; ``evolve`` therefore
splits each macro step into however many equal substeps keep every
``nu`` at or below :data:`STABILITY_TARGET`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernel import apply_passes
from .analytic import diffusion_coefficient, gaussian_pdf
from .core import Field, GaussianState, Grid1D, PhysicalParams
from .errors import DomainTooSmallError, StabilityError, ValidationError

#: Hard explicit-scheme bound: a single step with nu above this is unstable.
VON_NEUMANN_LIMIT = 0.5

#: Substepping target, strictly below the bound because the coefficient
#: keeps growing within a macro step.
STABILITY_TARGET = 0.4

#: Mass within this many cells of either edge counts as boundary leak.
_EDGE_CELLS = 3


@dataclass(frozen=True)
class StepperReport:
    """Accounting for one evolve call."""

    macro_steps: int
    total_substeps: int
    max_courant: float
    mass_drift: float
    boundary_leak: float


def sample_gaussian_field(state: GaussianState, grid: Grid1D) -> Field:
    """Sample the initial Gaussian on the grid, renormalized to mass 1.

    The renormalization removes the O(dx^2) quadrature bias of plain
    sampling so conservation checks start from exactly unit mass.
    """
    v = gaussian_pdf(grid.x, state.center, state.sigma0)
    total = v.sum() * grid.dx
    if total <= 0.0:
        raise ValidationError("grid does not resolve the packet: sampled mass is zero")
    return Field(time=0.0, values=v / total)


def fd_step(field: Field, nu: float) -> Field:
    """One explicit stencil pass with coefficient ``nu``.

    Edge nodes keep their values (the held-edge variant of a Dirichlet
    boundary). Rejects ``nu`` outside [0, 0.5]: the caller must substep.
    The field's time tag is unchanged; time bookkeeping lives with the
    caller because ``nu`` already folds in the step length.
    """
    nu = float(nu)
    if not (0.0 <= nu <= VON_NEUMANN_LIMIT):
        raise StabilityError(
            f"nu={nu!r} outside [0, {VON_NEUMANN_LIMIT}]; split the step"
        )
    out = apply_passes(field.values, np.array([nu], dtype=np.float64))
    # at nu = 1/2 exact cancellation can round to -eps; clamp the roundoff
    np.maximum(out, 0.0, out=out)
    return Field(time=field.time, values=out)


def courant_number(t_next: float, grid: Grid1D, sigma0: float, diffusivity: float) -> float:
    """Stencil coefficient D_t(t_next) * dt / dx**2 at the step end time.

    Evaluating at the end time is the conservative choice: the
    coefficient is increasing, so this is its largest value in the step.
    """
    return diffusion_coefficient(t_next, sigma0, diffusivity) * grid.dt / grid.dx**2


def _snap_indices(snapshot_times, grid: Grid1D, t0: float) -> list[int]:
    times = np.asarray(snapshot_times, dtype=np.float64)
    if times.ndim != 1 or times.size == 0:
        raise ValidationError("snapshot_times must be a non-empty 1-d sequence")
    if np.any(np.diff(times) < 0.0):
        raise ValidationError("snapshot_times must be sorted ascending")
    if np.any(times < t0):
        raise ValidationError(f"snapshot_times must be >= start time {t0}")
    idx = np.rint((times - t0) / grid.dt).astype(int)
    if np.any(idx > grid.n_steps):
        raise ValidationError(
            f"snapshot_times reach past the final step t={t0 + grid.t_final}"
        )
    return [int(i) for i in idx]


def _edge_fraction(v: np.ndarray) -> float:
    total = v.sum()
    if total <= 0.0:
        return 0.0
    edge = v[:_EDGE_CELLS].sum() + v[-_EDGE_CELLS:].sum()
    return float(edge / total)


def evolve(
    initial: Field,
    grid: Grid1D,
    state: GaussianState,
    params: PhysicalParams,
    snapshot_times,
    *,
    leak_threshold: float = 1e-6,
    mass_tol: float = 1e-9,
) -> tuple[list[Field], StepperReport]:
    """March the density forward, emitting snapshots at the requested times.

    Requested times snap to the nearest completed macro step. Before each
    macro step the end-time coefficient decides the substep count; within
    the step the coefficient is re-evaluated at every substep end. The
    very first step from t=0 is a near no-op since the coefficient
    vanishes there; that is expected behavior, not a bug.

    Raises :class:`DomainTooSmallError` as soon as a snapshot holds more
    than ``leak_threshold`` of its mass within 3 cells of either edge.
    """
    if initial.values.shape[0] != grid.nx:
        raise ValidationError(
            f"initial field has {initial.values.shape[0]} nodes, grid has {grid.nx}"
        )
    mass0 = initial.mass(grid.dx)
    if abs(mass0 - 1.0) > mass_tol:
        raise ValidationError(
            f"initial field mass {mass0!r} is not 1 within {mass_tol}"
        )
    t0 = initial.time
    indices = _snap_indices(snapshot_times, grid, t0)
    wanted: dict[int, int] = {}
    for i in indices:
        wanted[i] = wanted.get(i, 0) + 1
    last = max(indices)

    sigma0 = state.sigma0
    d = params.diffusivity
    dx2 = grid.dx**2
    v = np.array(initial.values, dtype=np.float64)

    snapshots: list[Field] = []
    max_nu = 0.0
    total_substeps = 0
    worst_leak = 0.0

    def emit(step: int) -> None:
        nonlocal worst_leak
        t = t0 + step * grid.dt
        leak = _edge_fraction(v)
        worst_leak = max(worst_leak, leak)
        if leak > leak_threshold:
            raise DomainTooSmallError(
                f"boundary holds {leak:.3e} of the mass at t={t}; widen the domain"
            )
        for _ in range(wanted[step]):
            snapshots.append(Field(time=t, values=v))

    if 0 in wanted:
        emit(0)

    for m in range(1, last + 1):
        t_end = t0 + m * grid.dt
        nu_end = diffusion_coefficient(t_end, sigma0, d) * grid.dt / dx2
        n_sub = max(1, math.ceil(nu_end / STABILITY_TARGET - 1e-12))
        sub_dt = grid.dt / n_sub
        sub_ends = t0 + (m - 1) * grid.dt + sub_dt * np.arange(1, n_sub + 1)
        nus = diffusion_coefficient(sub_ends, sigma0, d) * (sub_dt / dx2)
        v = apply_passes(v, nus)
        max_nu = max(max_nu, float(nus[-1]))
        total_substeps += n_sub
        if m in wanted:
            emit(m)

    mass_final = float(v.sum() * grid.dx)
    report = StepperReport(
        macro_steps=last,
        total_substeps=total_substeps,
        max_courant=max_nu,
        mass_drift=abs(mass_final - mass0) / mass0,
        boundary_leak=worst_leak,
    )
    return snapshots, report


def second_moment_sigma(field: Field, grid: Grid1D) -> float:
    """Standard deviation of the density by discrete second moment."""
    v = field.values
    mass = v.sum() * grid.dx
    if mass <= 0.0:
        raise ValidationError("cannot take moments of a zero-mass field")
    x = grid.x
    mean = float((v * x).sum() * grid.dx / mass)
    var = float((v * (x - mean) ** 2).sum() * grid.dx / mass)
    return math.sqrt(var)
