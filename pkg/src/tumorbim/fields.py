"""Nystrom solution of the coupled boundary-field problems on the interface.

Unknowns, for a tumor curve G inside a fixed far-field curve G_inf:

* sigma           nutrient trace on G
* dsigma_dn       interior normal flux on G (exterior flux is (1/D) of it)
* far_flux        normal flux of the exterior field on G_inf
* eta             dipole density representing the modified pressure
* dp_dn           normal derivative of the modified pressure on G
* V               normal interface velocity

The nutrient satisfies (Lap - mu_i^2) sigma = 0 with mu_1 inside and
mu_2 = 1/Lambda outside, continuity of value and D-weighted flux across G,
and sigma = 1 on G_inf.  Green representation in each phase plus the jump
relations of the (1/2pi) K_0(mu r) double layer yield three coupled
integral equations collocated on G (twice) and G_inf (once); the dense
(2N + N_inf) system is assembled with the Kress rule on self-interactions
and the trapezoidal rule on cross-interactions.

The modified pressure is harmonic inside G with Dirichlet data
``Ginv kappa + (P - chi) sigma - A |x|^2 / (2d)`` and is represented as a
double layer with the -(1/2pi) ln r kernel, giving the second-kind
equation (-1/2 + D) eta = data whose normal derivative on G is the
arclength derivative of the single layer of eta'.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse.linalg

from tumorbim.bessel import k01_grid
from tumorbim.curve import (
    CurveGeometry,
    MarkerCurve,
    geometry_of,
    spectral_derivative,
)
from tumorbim.errors import SolverConvergenceError
from tumorbim.kernels import (
    helmholtz_self_splits,
    kress_matrix,
    laplace_double_matrix,
    laplace_single_split,
)

_DIRECT_SIZE_LIMIT = 4096
_GMRES_MAX_ITER = 500


@dataclass(frozen=True)
class ModelParams:
    """Nondimensional model parameters.

    D     diffusivity ratio (host / tumor)
    lam   uptake ratio (host / tumor); lam = 0 is not supported, use a
          small proxy value instead
    chi   chemotaxis coefficient
    P     proliferation rate
    A     apoptosis rate
    Ginv  adhesion (surface tension) strength
    """

    D: float
    lam: float
    chi: float
    P: float
    A: float
    Ginv: float

    d: int = field(default=2, init=False, repr=False)

    def __post_init__(self):
        if self.D <= 0.0:
            raise ValueError("D must be positive")
        if self.lam <= 0.0:
            raise ValueError(
                "lam must be positive (the uptake-free limit is approximated "
                "by a small value such as 1e-3)"
            )

    @property
    def mu1(self) -> float:
        return 1.0

    @property
    def mu2(self) -> float:
        return math.sqrt(self.lam / self.D)

    @property
    def penetration_length(self) -> float:
        """Lambda = sqrt(D / lam), the relative diffusional penetration."""
        return math.sqrt(self.D / self.lam)


@dataclass(frozen=True)
class BoundaryFields:
    """Solved traces on the interface and the far-field boundary."""

    sigma: np.ndarray
    dsigma_dn: np.ndarray
    far_flux: np.ndarray
    eta: np.ndarray
    dp_dn: np.ndarray
    V: np.ndarray
    iterations: int = 0
    residual: float = 0.0


def _solve_dense(a: np.ndarray, b: np.ndarray, tol: float, method: str, what: str):
    """Solve a dense system, verify the residual, report iteration count."""
    size = a.shape[0]
    if method == "auto":
        method = "direct" if size <= _DIRECT_SIZE_LIMIT else "gmres"
    iterations = 0
    if method == "direct":
        x = scipy.linalg.solve(a, b)
    elif method == "gmres":
        count = [0]

        def cb(_):
            count[0] += 1

        x, info = scipy.sparse.linalg.gmres(
            a,
            b,
            rtol=tol,
            atol=tol,
            restart=min(size, _GMRES_MAX_ITER),
            maxiter=_GMRES_MAX_ITER,
            callback=cb,
            callback_type="pr_norm",
        )
        iterations = count[0]
        if info != 0:
            raise SolverConvergenceError(
                f"{what}: GMRES failed to converge", residual=float(info)
            )
    else:
        raise ValueError(f"unknown solver method {method!r}")
    residual = float(np.max(np.abs(a @ x - b)) / max(1.0, np.max(np.abs(b))))
    if not np.isfinite(residual) or residual > tol:
        raise SolverConvergenceError(f"{what}: residual above tolerance", residual)
    return x, iterations, residual


def _self_blocks(curve, geo, mu):
    """Quadrature matrices (single, double) for one curve acting on itself."""
    n = curve.n
    h = 2.0 * np.pi / n
    q = kress_matrix(n)
    sl_split, dl_split = helmholtz_self_splits(curve, geo, mu)
    sl = (q * sl_split.log_part + h * sl_split.smooth_part) * geo.speed[None, :]
    dl = q * dl_split.log_part + h * dl_split.smooth_part
    return sl, dl


def _cross_blocks(src, src_geo, tgt, tgt_geo, mu):
    """Trapezoid quadrature matrices in both directions between two curves.

    Returns (sl_ts, dl_ts, sl_st, dl_st) where "ts" maps densities on src
    to values at tgt and "st" the reverse; the distance matrix and Bessel
    evaluations are shared.
    """
    dx = tgt.x[:, None] - src.x[None, :]
    dy = tgt.y[:, None] - src.y[None, :]
    r = np.hypot(dx, dy)
    k0, k1 = k01_grid(mu * r)
    green = (0.5 / np.pi) * k0

    h_src = 2.0 * np.pi / src.n
    h_tgt = 2.0 * np.pi / tgt.n
    sl_ts = h_src * green * src_geo.speed[None, :]
    sl_st = h_tgt * green.T * tgt_geo.speed[None, :]

    dot_src = dx * src_geo.normal[:, 0][None, :] + dy * src_geo.normal[:, 1][None, :]
    hf_ts = dot_src * src_geo.speed[None, :] / (2.0 * np.pi * r)
    dl_ts = h_src * hf_ts * (mu * k1)

    dot_tgt = -(dx * tgt_geo.normal[:, 0][:, None] + dy * tgt_geo.normal[:, 1][:, None])
    hf_st = dot_tgt.T * tgt_geo.speed[None, :] / (2.0 * np.pi * r.T)
    dl_st = h_tgt * hf_st * (mu * k1.T)
    return sl_ts, dl_ts, sl_st, dl_st


@dataclass
class _FarFieldCache:
    geo: CurveGeometry
    sl_self: np.ndarray
    dl_self_row_sum: np.ndarray


def _far_cache(farfield: MarkerCurve, far_geo: CurveGeometry, mu2: float):
    sl, dl = _self_blocks(farfield, far_geo, mu2)
    return _FarFieldCache(geo=far_geo, sl_self=sl, dl_self_row_sum=dl @ np.ones(farfield.n))


def solve_nutrient(
    tumor: MarkerCurve,
    farfield: MarkerCurve,
    params: ModelParams,
    tol: float = 1e-10,
    method: str = "auto",
    tumor_geo: CurveGeometry | None = None,
    far_cache: _FarFieldCache | None = None,
):
    """Solve the coupled integral equations for the two-phase nutrient field.

    Returns (sigma, dsigma_dn, far_flux, iterations, residual).  Raises
    ``SolverConvergenceError`` when the linear solve cannot reach ``tol``.
    """
    geo = tumor_geo if tumor_geo is not None else geometry_of(tumor)
    if far_cache is None:
        far_cache = _far_cache(farfield, geometry_of(farfield), params.mu2)
    n = tumor.n
    n_inf = farfield.n
    mu1, mu2, dref = params.mu1, params.mu2, params.D

    sl1, dl1 = _self_blocks(tumor, geo, mu1)
    sl2, dl2 = _self_blocks(tumor, geo, mu2)
    sl_gf, dl_gf, sl_fg, dl_fg = _cross_blocks(
        farfield, far_cache.geo, tumor, geo, mu2
    )

    size = 2 * n + n_inf
    a = np.zeros((size, size))
    b = np.zeros(size)
    eye = np.eye(n)

    # interior representation collocated on the tumor curve
    a[:n, :n] = 0.5 * eye + dl1
    a[:n, n : 2 * n] = -sl1
    # exterior representation collocated on the tumor curve
    a[n : 2 * n, :n] = -0.5 * eye + dl2
    a[n : 2 * n, n : 2 * n] = -(1.0 / dref) * sl2
    a[n : 2 * n, 2 * n :] = sl_gf
    b[n : 2 * n] = dl_gf @ np.ones(n_inf)
    # exterior representation collocated on the far-field curve
    a[2 * n :, :n] = dl_fg
    a[2 * n :, n : 2 * n] = -(1.0 / dref) * sl_fg
    a[2 * n :, 2 * n :] = far_cache.sl_self
    b[2 * n :] = 0.5 + far_cache.dl_self_row_sum

    x, iterations, residual = _solve_dense(a, b, tol, method, "nutrient solve")
    return x[:n], x[n : 2 * n], x[2 * n :], iterations, residual


def solve_pressure_density(
    tumor: MarkerCurve,
    sigma: np.ndarray,
    geometry: CurveGeometry,
    params: ModelParams,
    tol: float = 1e-10,
    method: str = "auto",
):
    """Second-kind solve for the dipole density of the modified pressure.

    (-1/2 + D) eta = Ginv kappa + (P - chi) sigma - A |x|^2 / (2d), where D
    is the double layer with the -(1/2pi) ln r kernel (so constants map to
    minus themselves and the operator is invertible).
    """
    n = tumor.n
    h = 2.0 * np.pi / n
    a = -0.5 * np.eye(n) - h * laplace_double_matrix(tumor, geometry)
    rhs = (
        params.Ginv * geometry.kappa
        + (params.P - params.chi) * sigma
        - params.A * (tumor.x**2 + tumor.y**2) / (2.0 * params.d)
    )
    eta, _, _ = _solve_dense(a, rhs, tol, method, "pressure solve")
    return eta


def pressure_normal_derivative(
    tumor: MarkerCurve, eta: np.ndarray, geometry: CurveGeometry | None = None
) -> np.ndarray:
    """dp/dn on the curve as d/ds of the single layer of deta/ds.

    Requires equal-arclength markers so that d/ds = (1/s_alpha) d/dalpha.
    """
    geo = geometry if geometry is not None else geometry_of(tumor)
    n = tumor.n
    h = 2.0 * np.pi / n
    eta_s = spectral_derivative(np.asarray(eta, dtype=float)) / geo.s_alpha
    split = laplace_single_split(tumor, geo)
    mat = (kress_matrix(n) * split.log_part + h * split.smooth_part) * geo.speed[None, :]
    single = mat @ eta_s
    return spectral_derivative(single) / geo.s_alpha


def normal_velocity(
    dp_dn: np.ndarray,
    dsigma_dn: np.ndarray,
    tumor: MarkerCurve,
    geometry: CurveGeometry,
    params: ModelParams,
) -> np.ndarray:
    """V = -dp/dn + P dsigma/dn - (A/d) (n . x) pointwise on the curve."""
    n_dot_x = geometry.normal[:, 0] * tumor.x + geometry.normal[:, 1] * tumor.y
    return -np.asarray(dp_dn) + params.P * np.asarray(dsigma_dn) - (
        params.A / params.d
    ) * n_dot_x


class FieldSolver:
    """Boundary-field solves against a fixed far-field curve.

    Precomputes the far-field self-interaction quadrature (the far-field
    boundary never moves) and exposes a callback suitable for the time
    stepper.  Instances hold no mutable state after construction and are
    safe to share across concurrent solves.
    """

    def __init__(
        self,
        farfield: MarkerCurve,
        params: ModelParams,
        tol: float = 1e-10,
        method: str = "auto",
    ):
        self.farfield = farfield
        self.params = params
        self.tol = tol
        self.method = method
        self.far_geo = geometry_of(farfield)
        self._cache = _far_cache(farfield, self.far_geo, params.mu2)

    def solve(self, tumor: MarkerCurve, geo: CurveGeometry | None = None) -> BoundaryFields:
        """All traces on the current tumor curve, nutrient first, then pressure."""
        if geo is None:
            geo = geometry_of(tumor)
        sigma, dsigma_dn, far_flux, iterations, residual = solve_nutrient(
            tumor,
            self.farfield,
            self.params,
            tol=self.tol,
            method=self.method,
            tumor_geo=geo,
            far_cache=self._cache,
        )
        eta = solve_pressure_density(
            tumor, sigma, geo, self.params, tol=self.tol, method=self.method
        )
        dp_dn = pressure_normal_derivative(tumor, eta, geo)
        v = normal_velocity(dp_dn, dsigma_dn, tumor, geo, self.params)
        return BoundaryFields(
            sigma=sigma,
            dsigma_dn=dsigma_dn,
            far_flux=far_flux,
            eta=eta,
            dp_dn=dp_dn,
            V=v,
            iterations=iterations,
            residual=residual,
        )

    def evaluate_sigma(
        self,
        points: np.ndarray,
        tumor: MarkerCurve,
        fields: BoundaryFields,
        region: str,
        tumor_geo: CurveGeometry | None = None,
    ) -> np.ndarray:
        """Probe the nutrient field at points strictly inside one phase.

        ``region`` is "tumor" or "host".  Plain trapezoidal evaluation of
        the Green representation; accuracy degrades near the curves
        (diagnostic use only).
        """
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        geo = tumor_geo if tumor_geo is not None else geometry_of(tumor)
        p = self.params
        if region == "tumor":
            sl, dl = _probe_blocks(pts, tumor, geo, p.mu1)
            return sl @ fields.dsigma_dn - dl @ fields.sigma
        if region == "host":
            sl_g, dl_g = _probe_blocks(pts, tumor, geo, p.mu2)
            sl_f, dl_f = _probe_blocks(pts, self.farfield, self.far_geo, p.mu2)
            return (
                dl_g @ fields.sigma
                - (1.0 / p.D) * (sl_g @ fields.dsigma_dn)
                + sl_f @ fields.far_flux
                - dl_f @ np.ones(self.farfield.n)
            )
        raise ValueError("region must be 'tumor' or 'host'")


def _probe_blocks(pts, curve, geo, mu):
    dx = pts[:, 0][:, None] - curve.x[None, :]
    dy = pts[:, 1][:, None] - curve.y[None, :]
    r = np.hypot(dx, dy)
    k0, k1 = k01_grid(mu * r)
    h = 2.0 * np.pi / curve.n
    sl = h * (0.5 / np.pi) * k0 * geo.speed[None, :]
    dot = dx * geo.normal[:, 0][None, :] + dy * geo.normal[:, 1][None, :]
    dl = h * dot * geo.speed[None, :] / (2.0 * np.pi * r) * (mu * k1)
    return sl, dl
