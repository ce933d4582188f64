"""Modified Bessel functions I_n and K_n in double precision.

Evaluation strategy:

* ``I_n``: ascending power series at every order.  All terms are positive,
  so there is no cancellation and the series is accurate up to the point
  where ``e^x`` overflows a double (an explicit ``OverflowError``).
* ``K_0``, ``K_1``: logarithmic series for small arguments; for moderate
  arguments a trapezoidal discretization of
  ``K_n(x) = int_0^inf exp(-x cosh t) cosh(n t) dt``
  (even integrand with double-exponential decay, so the rule converges
  spectrally); asymptotic series for large arguments.
* ``K_n`` with ``n >= 2``: upward recurrence from ``K_0``, ``K_1``
  (stable, since K grows with the order).

The branch cuts below were fixed by requiring adjacent branches to agree
to better than 1e-13 in a scan over the switchover neighbourhoods.

All functions accept scalars or arrays for ``x`` and are pure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

EULER_GAMMA = 0.5772156649015328606

_OVERFLOW_X = 705.0  # I_0(705) ~ 1e304; beyond ~709 the result overflows
_SERIES_MAX_TERMS = 700
_K_SMALL_CUT = 3.5  # log-series cancellation stays below ~e^(2*3.5) ~ 1e3
_K_LARGE_CUT = 20.0  # asymptotic optimal-truncation floor ~ e^(-2x)
_QUAD_NODES = 140
_QUAD_TAIL = 38.0  # truncate where exp(-x cosh T) <= exp(-x) * e^-38


def _check_order(n) -> int:
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise ValueError(f"order must be a non-negative integer, got {n!r}")
    return int(n)


def _as_array(x, *, positive: bool) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("argument must be finite")
    if positive:
        if np.any(arr <= 0.0):
            raise ValueError("argument must be strictly positive")
    elif np.any(arr < 0.0):
        raise ValueError("argument must be non-negative")
    return arr


def _i_series(n: int, x: np.ndarray) -> np.ndarray:
    # sum_k t_k, t_0 = (x/2)^n / n!, t_{k} = t_{k-1} * (x^2/4) / (k (n+k)).
    # The running recurrence keeps every intermediate on the scale of the
    # result, so nothing overflows before I_n itself would.
    q = 0.25 * x * x
    term = np.ones_like(x)
    for j in range(1, n + 1):
        term *= x / (2.0 * j)
    total = term.copy()
    for k in range(1, _SERIES_MAX_TERMS):
        term = term * (q / (k * (n + k)))
        total += term
        if np.all(term <= 1e-17 * total):
            break
    return total


def _k01_small(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # K_0(x) = -(ln(x/2) + gamma) I_0(x) + sum_{k>=1} h_k (x^2/4)^k / (k!)^2
    # with harmonic numbers h_k; K_1 = -K_0' differentiated term by term.
    q = 0.25 * x * x
    lg = np.log(0.5 * x) + EULER_GAMMA
    i0 = _i_series(0, x)
    i1 = _i_series(1, x)
    term = np.ones_like(x)
    s0 = np.zeros_like(x)
    s1 = np.zeros_like(x)
    h = 0.0
    for k in range(1, _SERIES_MAX_TERMS):
        term = term * (q / (k * k))
        h += 1.0 / k
        s0 += h * term
        s1 += h * term * (2.0 * k)
        if np.all(h * term <= 1e-18 * (1.0 + s0)):
            break
    k0 = -lg * i0 + s0
    k1 = i0 / x + lg * i1 - s1 / x
    return k0, k1


def _k01_quad(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Trapezoid on [0, T] for the even integrand exp(-x cosh t) cosh(nt);
    # endpoint derivatives vanish at 0 (even) and the tail is cut where it
    # is e^-38 below the peak, so the rule is effectively spectral.
    t_max = np.arccosh(1.0 + _QUAD_TAIL / _K_SMALL_CUT)
    t = np.linspace(0.0, t_max, _QUAD_NODES + 1)
    w = np.full(t.size, t_max / _QUAD_NODES)
    w[0] *= 0.5
    w[-1] *= 0.5
    ch = np.cosh(t)
    k0 = np.empty_like(x)
    k1 = np.empty_like(x)
    chunk = max(1, 2_000_000 // t.size)
    flat = x.ravel()
    out0 = k0.ravel()
    out1 = k1.ravel()
    for lo in range(0, flat.size, chunk):
        hi = lo + chunk
        e = np.exp(-np.outer(flat[lo:hi], ch))
        out0[lo:hi] = e @ w
        out1[lo:hi] = e @ (w * ch)
    return k0, k1


def _k01_asym(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # K_n(x) ~ sqrt(pi/2x) e^-x sum_k c_k(n)/x^k with
    # c_k(n) = prod_{j<=k} (4n^2 - (2j-1)^2) / (8 j); 25 terms are strictly
    # decreasing for x >= 20 and end below 1e-17.
    inv = 1.0 / x
    s0 = np.ones_like(x)
    s1 = np.ones_like(x)
    t0 = np.ones_like(x)
    t1 = np.ones_like(x)
    for k in range(1, 26):
        odd2 = (2 * k - 1) ** 2
        t0 = t0 * ((-odd2) / (8.0 * k)) * inv
        t1 = t1 * ((4.0 - odd2) / (8.0 * k)) * inv
        s0 += t0
        s1 += t1
    pref = np.sqrt(0.5 * np.pi * inv) * np.exp(-x)
    return pref * s0, pref * s1


def _k01(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    k0 = np.empty_like(x)
    k1 = np.empty_like(x)
    small = x <= _K_SMALL_CUT
    large = x >= _K_LARGE_CUT
    mid = ~(small | large)
    if np.any(small):
        k0[small], k1[small] = _k01_small(x[small])
    if np.any(mid):
        k0[mid], k1[mid] = _k01_quad(x[mid])
    if np.any(large):
        k0[large], k1[large] = _k01_asym(x[large])
    return k0, k1


def _restore(value: np.ndarray, scalar: bool):
    return float(value[()]) if scalar else value


def bessel_i(n, x):
    """I_n(x) for integer n >= 0 and x >= 0 (x = 0 returns the limit).

    Raises ``OverflowError`` once the result exceeds double range.
    """
    n = _check_order(n)
    arr = _as_array(x, positive=False)
    if np.any(arr > _OVERFLOW_X):
        raise OverflowError(
            f"I_{n}(x) overflows double precision for x > {_OVERFLOW_X:g}"
        )
    return _restore(_i_series(n, arr), np.isscalar(x) or np.ndim(x) == 0)


def bessel_k(n, x):
    """K_n(x) for integer n >= 0 and strictly positive x."""
    n = _check_order(n)
    arr = _as_array(x, positive=True)
    k0, k1 = _k01(arr)
    if n == 0:
        out = k0
    elif n == 1:
        out = k1
    else:
        prev, cur = k0, k1
        for j in range(1, n):
            prev, cur = cur, prev + (2.0 * j / arr) * cur
        out = cur
    return _restore(out, np.isscalar(x) or np.ndim(x) == 0)


def bessel_i_prime(n, x):
    """I_n'(x) composed as I_{n-1}(x) - (n/x) I_n(x); I_0' = I_1."""
    n = _check_order(n)
    if n == 0:
        return bessel_i(1, x)
    arr = _as_array(x, positive=False)
    scalar = np.isscalar(x) or np.ndim(x) == 0
    if np.any(arr > _OVERFLOW_X):
        raise OverflowError(
            f"I_{n}'(x) overflows double precision for x > {_OVERFLOW_X:g}"
        )
    out = np.empty_like(arr)
    pos = arr > 0.0
    xp = arr[pos]
    out[pos] = _i_series(n - 1, xp) - (n / xp) * _i_series(n, xp)
    # limits at the origin: I_1'(0) = 1/2, I_n'(0) = 0 otherwise
    out[~pos] = 0.5 if n == 1 else 0.0
    return _restore(out, scalar)


def bessel_k_prime(n, x):
    """K_n'(x) composed as -K_{n-1}(x) - (n/x) K_n(x); K_0' = -K_1."""
    n = _check_order(n)
    if n == 0:
        out = bessel_k(1, x)
        return -out
    arr = _as_array(x, positive=True)
    out = -bessel_k(n - 1, arr) - (n / arr) * bessel_k(n, arr)
    return _restore(np.asarray(out), np.isscalar(x) or np.ndim(x) == 0)


def modified_bessel_grid(x: np.ndarray) -> tuple[np.ndarray, ...]:
    """I_0, I_1, K_0, K_1 on a strictly positive array, in one pass.

    Kernel-assembly fast path: skips scalar conveniences, shares the
    branch masks between K_0 and K_1.
    """
    arr = np.asarray(x, dtype=float)
    i0 = _i_series(0, arr)
    i1 = _i_series(1, arr)
    k0, k1 = _k01(arr)
    return i0, i1, k0, k1


def k01_grid(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """K_0 and K_1 on a strictly positive array (assembly fast path)."""
    return _k01(np.asarray(x, dtype=float))


def bessel_i_grid(n: int, x: np.ndarray) -> np.ndarray:
    """I_n on a non-negative array (assembly fast path, no overflow guard)."""
    return _i_series(n, np.asarray(x, dtype=float))


@dataclass(frozen=True)
class BesselPair:
    """I_n and K_n evaluated at a common order and argument.

    Satisfies the Wronskian identity
    ``I_n(x) K_{n+1}(x) + I_{n+1}(x) K_n(x) = 1/x``.
    """

    order: int
    argument: float
    i_value: float
    k_value: float


def bessel_pair(n, x) -> BesselPair:
    """Evaluate I_n and K_n together at a scalar argument."""
    return BesselPair(
        order=_check_order(n),
        argument=float(x),
        i_value=bessel_i(n, x),
        k_value=bessel_k(n, x),
    )
