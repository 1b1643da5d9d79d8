"""Closed-form reference solutions the numerical stepper is checked against.

Everything here is a pure function of its arguments: the Gaussian density,
its spreading law, the induced time-dependent diffusion coefficient, and
the analytic flux lines of a spreading packet.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .core import GaussianState
from .errors import ValidationError

_SQRT_2PI = math.sqrt(2.0 * math.pi)


def gaussian_pdf(x, center: float, sigma: float):
    """Normal density with the given mean and standard deviation.

    Accepts a scalar or an array of positions.
    """
    if not (sigma > 0.0):
        raise ValidationError(f"sigma must be positive, got {sigma!r}")
    z = (np.asarray(x, dtype=np.float64) - center) / sigma
    out = np.exp(-0.5 * z * z) / (_SQRT_2PI * sigma)
    return float(out) if np.isscalar(x) else out


def analytic_sigma(t, sigma0: float, diffusivity: float):
    """Packet width sigma0 * sqrt(1 + (D t / sigma0^2)^2) at time t >= 0."""
    if not (sigma0 > 0.0):
        raise ValidationError(f"sigma0 must be positive, got {sigma0!r}")
    if not (diffusivity > 0.0):
        raise ValidationError(f"diffusivity must be positive, got {diffusivity!r}")
    t_arr = np.asarray(t, dtype=np.float64)
    if np.any(t_arr < 0.0):
        raise ValidationError(f"t must be >= 0, got {t!r}")
    u = diffusivity * t_arr / sigma0**2
    out = sigma0 * np.sqrt(1.0 + u * u)
    return float(out) if np.isscalar(t) else out


def diffusion_coefficient(t, sigma0: float, diffusivity: float):
    """Time-dependent diffusion coefficient D**2 * t / sigma0**2.

    Zero at t=0 and growing linearly; this is what makes the spreading
    ballistic (variance growing like t**2) rather than diffusive.
    """
    if not (sigma0 > 0.0):
        raise ValidationError(f"sigma0 must be positive, got {sigma0!r}")
    if not (diffusivity > 0.0):
        raise ValidationError(f"diffusivity must be positive, got {diffusivity!r}")
    t_arr = np.asarray(t, dtype=np.float64)
    if np.any(t_arr < 0.0):
        raise ValidationError(f"t must be >= 0, got {t!r}")
    out = diffusivity**2 * t_arr / sigma0**2
    return float(out) if np.isscalar(t) else out


class ExponentFit(NamedTuple):
    alpha: float
    k: float


def verify_ballistic_exponent(sigma0: float, diffusivity: float, t_samples) -> ExponentFit:
    """Fit log(coefficient) vs log(t) and return (exponent, prefactor).

    For the coefficient above the data are exactly log-linear, so the fit
    recovers alpha = 1 and k = D**2 / sigma0**2 to rounding error.
    """
    t = np.asarray(t_samples, dtype=np.float64)
    if t.ndim != 1 or t.size < 3:
        raise ValidationError("need at least 3 sample times")
    if np.any(t <= 0.0):
        raise ValidationError("sample times must be positive")
    if np.unique(t).size < 3:
        raise ValidationError("need at least 3 distinct sample times")
    d_t = diffusion_coefficient(t, sigma0, diffusivity)
    slope, intercept = np.polyfit(np.log(t), np.log(d_t), 1)
    return ExponentFit(alpha=float(slope), k=float(math.exp(intercept)))


def normal_quantile(q: float, tol: float = 1e-12) -> float:
    """Standard-normal quantile by bisection on the erf-based CDF.

    Bisection over [-40, 40] to ``tol`` absolute; slow but trivially
    correct, and only ever called once per requested quantile.
    """
    if not (0.0 < q < 1.0):
        raise ValidationError(f"quantile must be in (0, 1), got {q!r}")
    lo, hi = -40.0, 40.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if 0.5 * (1.0 + math.erf(mid / math.sqrt(2.0))) < q:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def analytic_flux_line(q: float, t: float, state: GaussianState, diffusivity: float) -> float:
    """Position of the q-quantile of the spreading packet at time t.

    Equal to center + z_q * sigma(t); relative to the center every
    quantile path is a homothety with ratio sigma(t) / sigma0.
    """
    z = normal_quantile(q)
    return state.center + z * analytic_sigma(t, state.sigma0, diffusivity)
