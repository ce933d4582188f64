"""Green's-function kernels and log-singularity quadrature on periodic curves.

Conventions, fixed once here and validated by the interior Gauss identity
and the concentric-circle benchmarks:

* modified Helmholtz with parameter mu:  G(x, x') = (1/2pi) K_0(mu r);
  the double-layer kernel is  dG/dn' s_alpha' = hf * mu K_1(mu r)  with
  hf = ((x - x') . n') s_alpha' / (2 pi r).
* Laplace double layer: built from  G_L(x, x') = (1/2pi) ln r, for which a
  unit density integrates to 1 inside, 1/2 on the curve, 0 outside.
* Laplace single layer (pressure representation): G = -(1/2pi) ln r.
* normals point outward from a positively oriented curve.

Kernels with a log singularity are split as
``log_part * ln(2|sin((alpha - alpha')/2)|) + smooth_part``; the smooth
part carries an analytic value on the diagonal.  Self-interactions combine
the Kress rule on the log part with the trapezoidal rule on the smooth
part, which keeps spectral accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from tumorbim.bessel import EULER_GAMMA, bessel_i_grid, k01_grid
from tumorbim.curve import CurveGeometry, MarkerCurve, geometry_of


@dataclass(frozen=True)
class KressRule:
    """Spectrally accurate rule for integrands with a ln(2|sin|) factor.

    ``int_0^2pi f(a_i, a') ln(2|sin((a_i - a')/2)|) da'
      ~ sum_j q_|j-i| f(a_i, a_j)``  on 2m uniform nodes.
    """

    m: int
    weights: np.ndarray


@lru_cache(maxsize=None)
def _kress_weights_cached(m: int) -> np.ndarray:
    j = np.arange(2 * m)
    k = np.arange(1, m)
    q = -(np.pi / m) * (np.cos(np.outer(j, k) * np.pi / m) @ (1.0 / k))
    q -= np.where(j % 2 == 0, 1.0, -1.0) * np.pi / (2.0 * m * m)
    q.setflags(write=False)
    return q


def kress_weights(m: int) -> KressRule:
    """Quadrature weights q_j for a grid of 2m points."""
    if m < 2:
        raise ValueError("m must be at least 2")
    return KressRule(m=m, weights=_kress_weights_cached(m))


def kress_matrix(n: int) -> np.ndarray:
    """Circulant matrix Q[i, j] = q_|i-j| for an n-point grid (n = 2m)."""
    if n % 2 != 0:
        raise ValueError("grid size must be even")
    q = _kress_weights_cached(n // 2)
    idx = np.arange(n)
    return q[np.abs(idx[:, None] - idx[None, :])]


def singular_log_quadrature(rule: KressRule, f_samples: np.ndarray, i: int) -> float:
    """Apply the rule to samples of f(alpha_i, .) collocated at node i."""
    f = np.asarray(f_samples, dtype=float)
    n = 2 * rule.m
    if f.size != n:
        raise ValueError(f"expected {n} samples, got {f.size}")
    j = np.arange(n)
    return float(np.dot(rule.weights[np.abs(j - i)], f))


def log_sin_matrix(alpha_t: np.ndarray, alpha_s: np.ndarray) -> np.ndarray:
    """ln(2|sin((alpha - alpha')/2)|) with zeros where the nodes coincide."""
    d = 0.5 * (alpha_t[:, None] - alpha_s[None, :])
    s = 2.0 * np.abs(np.sin(d))
    out = np.zeros_like(s)
    mask = s > 0.0
    out[mask] = np.log(s[mask])
    return out


@dataclass(frozen=True)
class SplitKernel:
    """A kernel written as log_part * ln(2|sin|) + smooth_part."""

    log_part: np.ndarray
    smooth_part: np.ndarray


# The raw splits use I_n(mu r) as the log coefficient, which grows like
# e^(mu r): for mu * diameter beyond ~15 the two split pieces become
# exponentially large and cancel, destroying the conditioning of the
# assembled operator.  Multiplying the log coefficient by the analytic
# taper exp(-(z/z0)^(2p)) leaves the split algebraically exact, matches
# the singularity to order Delta^(2p) on the diagonal, and caps every
# piece at ~e^z0.  With z0 = 10, p = 5 the taper is inert (phi = 1 to
# 1e-10) whenever mu * r <= 4.
_TAPER_Z0 = 10.0
_TAPER_POWER = 10
_TAPER_OFF = 40.0  # phi underflows: skip the I-series entirely


def _taper(z: np.ndarray) -> np.ndarray:
    with np.errstate(under="ignore"):
        return np.exp(-((z / _TAPER_Z0) ** _TAPER_POWER))


def _pair_data(src: MarkerCurve, tgt: MarkerCurve, src_geo: CurveGeometry):
    dx = tgt.x[:, None] - src.x[None, :]
    dy = tgt.y[:, None] - src.y[None, :]
    r = np.hypot(dx, dy)
    dot_n = dx * src_geo.normal[:, 0][None, :] + dy * src_geo.normal[:, 1][None, :]
    return r, dot_n


def helmholtz_single_split(
    src: MarkerCurve,
    tgt: MarkerCurve,
    mu: float,
    src_geo: CurveGeometry | None = None,
) -> SplitKernel:
    """Split of G = (1/2pi) K_0(mu r) between two curves (or one curve).

    log_part = -(1/2pi) I_0(mu r); on the diagonal the smooth part takes
    its removable-singularity value -(1/2pi)(ln(mu s_alpha / 2) + gamma).
    The arclength factor s_alpha' is *not* included.
    """
    if mu <= 0.0:
        raise ValueError("mu must be positive")
    same = tgt is src
    if src_geo is None:
        src_geo = geometry_of(src)
    r, _ = _pair_data(src, tgt, src_geo)
    if same:
        np.fill_diagonal(r, 1.0)
    z = mu * r
    phi = _taper(z)
    i0t = phi * bessel_i_grid(0, np.minimum(z, _TAPER_OFF))
    k0, _ = k01_grid(z)
    log_part = -(0.5 / np.pi) * i0t
    lmat = log_sin_matrix(tgt.alpha, src.alpha)
    smooth = (0.5 / np.pi) * (k0 + i0t * lmat)
    if same:
        # r was masked on the diagonal: restore I_0(0) = 1 and the
        # removable-singularity limit of the smooth part
        np.fill_diagonal(log_part, -(0.5 / np.pi))
        np.fill_diagonal(
            smooth, -(0.5 / np.pi) * (np.log(0.5 * mu * src_geo.speed) + EULER_GAMMA)
        )
    return SplitKernel(log_part=log_part, smooth_part=smooth)


def helmholtz_double_split(
    src: MarkerCurve,
    tgt: MarkerCurve,
    mu: float,
    src_geo: CurveGeometry | None = None,
) -> SplitKernel:
    """Split of dG/dn' s_alpha' for the modified Helmholtz kernel.

    With hf = ((x - x') . n') s_alpha' / (2 pi r), the kernel equals
    hf * mu K_1(mu r); its log coefficient hf * mu I_1(mu r) vanishes on
    the diagonal and the smooth part tends to -kappa s_alpha / (4 pi).
    """
    if mu <= 0.0:
        raise ValueError("mu must be positive")
    same = tgt is src
    if src_geo is None:
        src_geo = geometry_of(src)
    r, dot_n = _pair_data(src, tgt, src_geo)
    if same:
        np.fill_diagonal(r, 1.0)
    hf = dot_n * src_geo.speed[None, :] / (2.0 * np.pi * r)
    z = mu * r
    phi = _taper(z)
    i1t = phi * bessel_i_grid(1, np.minimum(z, _TAPER_OFF))
    _, k1 = k01_grid(z)
    log_part = hf * (mu * i1t)
    lmat = log_sin_matrix(tgt.alpha, src.alpha)
    smooth = hf * mu * (k1 - i1t * lmat)
    if same:
        np.fill_diagonal(log_part, 0.0)
        np.fill_diagonal(smooth, -src_geo.kappa * src_geo.speed / (4.0 * np.pi))
    return SplitKernel(log_part=log_part, smooth_part=smooth)


def laplace_double_matrix(
    curve: MarkerCurve, geo: CurveGeometry | None = None
) -> np.ndarray:
    """Laplace double-layer kernel dG_L/dn' s_alpha' on one curve.

    Smooth on analytic curves (removable singularity); the diagonal is
    kappa s_alpha / (4 pi).  Trapezoidal weights 2pi/N times the row sums
    give 1/2 at on-curve targets (Gauss identity).
    """
    if geo is None:
        geo = geometry_of(curve)
    r, dot_n = _pair_data(curve, curve, geo)
    np.fill_diagonal(r, 1.0)
    out = -(0.5 / np.pi) * dot_n * geo.speed[None, :] / r**2
    np.fill_diagonal(out, geo.kappa * geo.speed / (4.0 * np.pi))
    return out


def laplace_double_kernel(curve: MarkerCurve, i: int, j: int) -> float:
    """Single entry of the Laplace double-layer kernel matrix."""
    return float(laplace_double_matrix(curve)[i, j])


def laplace_double_cross(
    src: MarkerCurve, targets: np.ndarray, src_geo: CurveGeometry | None = None
) -> np.ndarray:
    """dG_L/dn' s_alpha' from a curve to arbitrary off-curve targets."""
    if src_geo is None:
        src_geo = geometry_of(src)
    dx = targets[:, 0][:, None] - src.x[None, :]
    dy = targets[:, 1][:, None] - src.y[None, :]
    r2 = dx * dx + dy * dy
    dot_n = dx * src_geo.normal[:, 0][None, :] + dy * src_geo.normal[:, 1][None, :]
    return -(0.5 / np.pi) * dot_n * src_geo.speed[None, :] / r2


def laplace_single_split(
    curve: MarkerCurve, geo: CurveGeometry | None = None
) -> SplitKernel:
    """Split of the pressure single-layer kernel G = -(1/2pi) ln r.

    log_part is the constant -(1/2pi); the smooth remainder equals
    -(1/2pi) ln(r / (2|sin((alpha-alpha')/2)|)) with diagonal
    -(1/2pi) ln(s_alpha).  The arclength factor is not included.
    """
    if geo is None:
        geo = geometry_of(curve)
    r, _ = _pair_data(curve, curve, geo)
    np.fill_diagonal(r, 1.0)
    lmat = log_sin_matrix(curve.alpha, curve.alpha)
    smooth = np.empty_like(r)
    off = ~np.eye(curve.n, dtype=bool)
    smooth[off] = -(0.5 / np.pi) * (np.log(r[off]) - lmat[off])
    np.fill_diagonal(smooth, -(0.5 / np.pi) * np.log(geo.speed))
    log_part = np.full_like(r, -(0.5 / np.pi))
    return SplitKernel(log_part=log_part, smooth_part=smooth)


def helmholtz_self_splits(
    curve: MarkerCurve, geo: CurveGeometry, mu: float
) -> tuple[SplitKernel, SplitKernel]:
    """Single- and double-layer splits on one curve, sharing Bessel work."""
    if mu <= 0.0:
        raise ValueError("mu must be positive")
    r, dot_n = _pair_data(curve, curve, geo)
    np.fill_diagonal(r, 1.0)
    z = mu * r
    phi = _taper(z)
    zc = np.minimum(z, _TAPER_OFF)
    i0t = phi * bessel_i_grid(0, zc)
    i1t = phi * bessel_i_grid(1, zc)
    k0, k1 = k01_grid(z)
    lmat = log_sin_matrix(curve.alpha, curve.alpha)

    sl_log = -(0.5 / np.pi) * i0t
    sl_smooth = (0.5 / np.pi) * (k0 + i0t * lmat)
    # r was masked on the diagonal: restore I_0(0) = 1 and the limit value
    np.fill_diagonal(sl_log, -(0.5 / np.pi))
    np.fill_diagonal(
        sl_smooth, -(0.5 / np.pi) * (np.log(0.5 * mu * geo.speed) + EULER_GAMMA)
    )

    hf = dot_n * geo.speed[None, :] / (2.0 * np.pi * r)
    dl_log = hf * (mu * i1t)
    dl_smooth = hf * mu * (k1 - i1t * lmat)
    np.fill_diagonal(dl_log, 0.0)
    np.fill_diagonal(dl_smooth, -geo.kappa * geo.speed / (4.0 * np.pi))
    return (
        SplitKernel(log_part=sl_log, smooth_part=sl_smooth),
        SplitKernel(log_part=dl_log, smooth_part=dl_smooth),
    )


def helmholtz_green_cross(
    src: MarkerCurve, tgt: MarkerCurve, mu: float, src_geo: CurveGeometry | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Direct G and dG/dn' s_alpha' between two disjoint curves.

    No singularity treatment: callers pair these with plain trapezoidal
    weights over the source grid.
    """
    if src_geo is None:
        src_geo = geometry_of(src)
    r, dot_n = _pair_data(src, tgt, src_geo)
    if np.min(r) <= 0.0:
        raise ValueError("curves must be disjoint for the direct kernel")
    k0, k1 = k01_grid(mu * r)
    green = (0.5 / np.pi) * k0
    hf = dot_n * src_geo.speed[None, :] / (2.0 * np.pi * r)
    dgreen = hf * (mu * k1)
    return green, dgreen
