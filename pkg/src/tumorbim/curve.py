"""Closed analytic curves sampled on uniform 2pi-periodic marker grids.

A curve is stored as N marker positions at parameter values
``alpha_j = 2 pi j / N`` with N a power of two.  All derivatives are FFT
spectral derivatives, so geometric quantities converge super-algebraically
for analytic curves.  The tangent angle is kept as a continuous lift; only
``theta(alpha) - alpha`` is periodic and enters Fourier operations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from tumorbim.errors import DegenerateCurveError, ReparametrizationError

_SPEED_FLOOR = 1e-12
_NEWTON_MAX_ITER = 50


def _is_power_of_two(n: int) -> bool:
    return n >= 4 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class MarkerCurve:
    """A closed curve sampled at N equispaced-in-parameter markers."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.ascontiguousarray(self.x, dtype=float)
        y = np.ascontiguousarray(self.y, dtype=float)
        if x.ndim != 1 or x.shape != y.shape:
            raise ValueError("x and y must be 1-d arrays of equal length")
        if not _is_power_of_two(x.size):
            raise ValueError(f"marker count must be a power of two >= 4, got {x.size}")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValueError("marker coordinates must be finite")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.size

    @property
    def alpha(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.n) / self.n

    def points(self) -> np.ndarray:
        """Marker positions as an (N, 2) array."""
        return np.column_stack([self.x, self.y])


@dataclass(frozen=True)
class CurveGeometry:
    """Spectral geometry of a marker curve.

    ``s_alpha`` is the mean arclength derivative L / 2pi; ``speed`` holds
    the pointwise values (they coincide on equal-arclength grids).
    Tangent and normal follow the outward convention
    ``t = (cos theta, sin theta)``, ``n = (sin theta, -cos theta)``.
    """

    theta: np.ndarray
    s_alpha: float
    speed: np.ndarray
    kappa: np.ndarray
    tangent: np.ndarray
    normal: np.ndarray

    @property
    def length(self) -> float:
        return 2.0 * np.pi * self.s_alpha


def spectral_derivative(samples: np.ndarray, order: int = 1) -> np.ndarray:
    """Differentiate periodic samples by multiplying mode k with (ik)^order.

    Exact for band-limited input.  The Nyquist mode is zeroed for odd
    orders to keep the result real and consistent.
    """
    f = np.asarray(samples, dtype=float)
    if f.ndim != 1:
        raise ValueError("samples must be a 1-d array")
    if order < 1:
        raise ValueError("order must be a positive integer")
    n = f.size
    if n % 2 != 0:
        raise ValueError("sample count must be even")
    coef = np.fft.rfft(f)
    k = np.arange(coef.size)
    coef *= (1j * k) ** order
    if order % 2 == 1:
        coef[-1] = 0.0
    return np.fft.irfft(coef, n)


def periodic_antiderivative(samples: np.ndarray) -> np.ndarray:
    """Periodic part of the antiderivative (mean of the input is dropped).

    With P the returned array, ``int_0^alpha f = mean(f) alpha + P - P[0]``.
    """
    f = np.asarray(samples, dtype=float)
    n = f.size
    coef = np.fft.rfft(f)
    k = np.arange(coef.size)
    with np.errstate(divide="ignore", invalid="ignore"):
        coef = np.where(k > 0, coef / (1j * np.maximum(k, 1)), 0.0)
    coef[0] = 0.0
    return np.fft.irfft(coef, n)


def trig_interp(samples: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Evaluate the trigonometric interpolant of periodic samples.

    The Nyquist coefficient is assigned to a pure cosine so the result is
    real and matches the samples exactly at the grid points.
    """
    f = np.asarray(samples, dtype=float)
    t = np.atleast_1d(np.asarray(targets, dtype=float))
    n = f.size
    coef = np.fft.rfft(f) / n
    k = np.arange(1, n // 2)
    phases = np.outer(t, k)
    out = np.full(t.size, coef[0].real)
    out += 2.0 * (np.cos(phases) @ coef[1:-1].real - np.sin(phases) @ coef[1:-1].imag)
    out += coef[-1].real * np.cos(0.5 * n * t)
    return out


def geometry_of(curve: MarkerCurve) -> CurveGeometry:
    """Tangent angle, curvature, and frame of a marker curve.

    theta is unwrapped to a continuous lift; for a positively oriented
    simple curve it increases by 2pi over a period.
    """
    xa = spectral_derivative(curve.x)
    ya = spectral_derivative(curve.y)
    xaa = spectral_derivative(curve.x, 2)
    yaa = spectral_derivative(curve.y, 2)
    speed = np.hypot(xa, ya)
    if np.min(speed) < _SPEED_FLOOR:
        raise DegenerateCurveError(
            f"arclength derivative fell below {_SPEED_FLOOR:g}"
        )
    theta = np.unwrap(np.arctan2(ya, xa))
    kappa = (xa * yaa - xaa * ya) / speed**3
    tangent = np.column_stack([xa, ya]) / speed[:, None]
    normal = np.column_stack([ya, -xa]) / speed[:, None]
    return CurveGeometry(
        theta=theta,
        s_alpha=float(np.mean(speed)),
        speed=speed,
        kappa=kappa,
        tangent=tangent,
        normal=normal,
    )


def geometry_from_theta(theta: np.ndarray, s_alpha: float) -> CurveGeometry:
    """Geometry implied by a tangent angle profile on an equal-arclength grid.

    Cheaper than ``geometry_of`` and exactly self-consistent with the
    tangent-angle evolution: kappa = theta_alpha / s_alpha.
    """
    theta = np.asarray(theta, dtype=float)
    n = theta.size
    alpha = 2.0 * np.pi * np.arange(n) / n
    theta_a = 1.0 + spectral_derivative(theta - alpha)
    speed = np.full(n, float(s_alpha))
    return CurveGeometry(
        theta=theta,
        s_alpha=float(s_alpha),
        speed=speed,
        kappa=theta_a / s_alpha,
        tangent=np.column_stack([np.cos(theta), np.sin(theta)]),
        normal=np.column_stack([np.sin(theta), -np.cos(theta)]),
    )


def reconstruct_curve(theta: np.ndarray, s_alpha: float, ref_point) -> MarkerCurve:
    """Marker positions from a tangent angle profile and uniform s_alpha.

    x(alpha) = x(0) + s_alpha (int_0^alpha cos theta
               - alpha/2pi int_0^2pi cos theta), same for y with sin.
    The mean subtraction makes the curve close exactly.
    """
    theta = np.asarray(theta, dtype=float)
    ref = np.asarray(ref_point, dtype=float)
    px = periodic_antiderivative(np.cos(theta))
    py = periodic_antiderivative(np.sin(theta))
    return MarkerCurve(
        x=ref[0] + s_alpha * (px - px[0]),
        y=ref[1] + s_alpha * (py - py[0]),
    )


def area_and_length(curve: MarkerCurve) -> tuple[float, float]:
    """Enclosed area and total arclength by spectral quadrature."""
    xa = spectral_derivative(curve.x)
    ya = spectral_derivative(curve.y)
    h = 2.0 * np.pi / curve.n
    area = 0.5 * h * float(np.sum(curve.x * ya - curve.y * xa))
    length = h * float(np.sum(np.hypot(xa, ya)))
    return area, length


def equal_arclength_reparametrize(curve: MarkerCurve, tol: float = 1e-12) -> MarkerCurve:
    """Resample a curve so markers are equally spaced in arclength.

    Solves ``int_0^beta_j s dbeta = (j/N) L`` for each beta_j by Newton
    iteration (uniform initial guess) and evaluates the new markers by
    trigonometric interpolation.  Marker 0 is left in place.
    """
    n = curve.n
    xa = spectral_derivative(curve.x)
    ya = spectral_derivative(curve.y)
    speed = np.hypot(xa, ya)
    if np.min(speed) < _SPEED_FLOOR:
        raise DegenerateCurveError("cannot reparametrize a degenerate curve")
    length = 2.0 * np.pi * float(np.mean(speed))
    s_mean = length / (2.0 * np.pi)
    pint = periodic_antiderivative(speed)

    def arc(beta):
        return s_mean * beta + trig_interp(pint, beta) - pint[0]

    beta = 2.0 * np.pi * np.arange(n) / n
    target = np.arange(n) / n * length
    for _ in range(_NEWTON_MAX_ITER):
        resid = arc(beta) - target
        if np.max(np.abs(resid)) <= tol * length:
            break
        beta = beta - resid / np.maximum(trig_interp(speed, beta), _SPEED_FLOOR)
    else:
        raise ReparametrizationError(
            f"Newton did not reach |residual| <= {tol:g} * L in "
            f"{_NEWTON_MAX_ITER} iterations"
        )
    return MarkerCurve(x=trig_interp(curve.x, beta), y=trig_interp(curve.y, beta))
