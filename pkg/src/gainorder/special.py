"""Special functions backing the gain-distribution families.

Both functions are implemented from scratch with the classic split between a
power series on one part of the domain and a continued fraction (modified
Lentz) on the other.  The test suite cross-checks them against scipy and
against direct quadrature; the library itself never calls scipy for these.
"""

from __future__ import annotations

import math

import numpy as np

_EULER_GAMMA = 0.57721566490153286060651209008240243
_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 600


def lower_incomplete_gamma_regularized(s: float, x):
    """Regularized lower incomplete gamma function P(s, x) = gamma(s, x) / Gamma(s).

    Series expansion for x < s + 1, continued fraction for the complement
    otherwise.  Absolute error below 1e-10 for s in [0.1, 50], x in [0, 200].

    Parameters
    ----------
    s : float
        Shape parameter, must be > 0.
    x : float or array_like
        Evaluation point(s), must be >= 0.
    """
    if not np.isfinite(s) or s <= 0.0:
        raise ValueError(f"shape parameter must be positive, got s={s}")
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0.0) or np.any(~np.isfinite(x_arr)):
        raise ValueError("x must be finite and >= 0")

    flat = x_arr.ravel()
    out = np.empty_like(flat)
    series_mask = flat < s + 1.0
    if np.any(series_mask):
        out[series_mask] = _gammainc_series(s, flat[series_mask])
    if np.any(~series_mask):
        out[~series_mask] = 1.0 - _gammainc_contfrac(s, flat[~series_mask])
    out = np.clip(out, 0.0, 1.0).reshape(x_arr.shape)
    return out if out.ndim else float(out)


def _gammainc_series(s: float, x: np.ndarray) -> np.ndarray:
    """P(s, x) via the series x^s e^-x / Gamma(s) * sum_n x^n / (s (s+1) ... (s+n))."""
    term = np.full_like(x, 1.0 / s)
    total = term.copy()
    ap = s
    live = np.arange(x.size)
    for _ in range(_MAX_ITER):
        ap += 1.0
        t = term[live] * x[live] / ap
        term[live] = t
        total[live] += t
        conv = np.abs(t) < np.abs(total[live]) * _EPS
        live = live[~conv]
        if live.size == 0:
            break
    # prefactor x^s e^-x / Gamma(s), in log space to dodge overflow
    with np.errstate(divide="ignore"):
        logpre = s * np.log(x) - x - math.lgamma(s)
    return np.where(x > 0.0, total * np.exp(logpre), 0.0)


def _gammainc_contfrac(s: float, x: np.ndarray) -> np.ndarray:
    """Q(s, x) = 1 - P(s, x) via the Lentz continued fraction, valid for x >= s + 1."""
    b = x + 1.0 - s
    c = np.full_like(x, 1.0 / _TINY)
    d = 1.0 / b
    h = d.copy()
    live = np.arange(x.size)
    for i in range(1, _MAX_ITER + 1):
        an = -i * (i - s)
        bl = b[live] + 2.0
        b[live] = bl
        dl = an * d[live] + bl
        dl = np.where(np.abs(dl) < _TINY, _TINY, dl)
        cl = bl + an / c[live]
        cl = np.where(np.abs(cl) < _TINY, _TINY, cl)
        dl = 1.0 / dl
        delta = dl * cl
        c[live] = cl
        d[live] = dl
        h[live] *= delta
        conv = np.abs(delta - 1.0) < _EPS
        live = live[~conv]
        if live.size == 0:
            break
    logpre = s * np.log(x) - x - math.lgamma(s)
    return np.exp(logpre) * h


def exp_integral_e1(x):
    """Exponential integral E1(x) = int_x^inf e^-t / t dt for x > 0.

    Series with the Euler-Mascheroni constant for x <= 1, continued fraction
    otherwise.  Absolute error below 1e-10 on [1e-4, 50].
    """
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr <= 0.0) or np.any(~np.isfinite(x_arr)):
        raise ValueError("x must be finite and > 0")

    flat = x_arr.ravel()
    out = np.empty_like(flat)
    series_mask = flat <= 1.0
    if np.any(series_mask):
        out[series_mask] = _e1_series(flat[series_mask])
    if np.any(~series_mask):
        out[~series_mask] = _e1_contfrac(flat[~series_mask])
    out = out.reshape(x_arr.shape)
    return out if out.ndim else float(out)


def exp_integral_e1_scaled(x):
    """Overflow-safe e^x * E1(x); the continued fraction yields it directly for x > 1."""
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr <= 0.0) or np.any(~np.isfinite(x_arr)):
        raise ValueError("x must be finite and > 0")
    flat = x_arr.ravel()
    out = np.empty_like(flat)
    series_mask = flat <= 1.0
    if np.any(series_mask):
        out[series_mask] = np.exp(flat[series_mask]) * _e1_series(flat[series_mask])
    if np.any(~series_mask):
        out[~series_mask] = _e1_lentz_fraction(flat[~series_mask])
    out = out.reshape(x_arr.shape)
    return out if out.ndim else float(out)


def _e1_series(x: np.ndarray) -> np.ndarray:
    """E1(x) = -gamma - ln x + sum_k (-1)^(k+1) x^k / (k k!)."""
    total = np.zeros_like(x)
    term = np.ones_like(x)
    for k in range(1, _MAX_ITER):
        term = term * (-x) / k
        contrib = -term / k
        total += contrib
        if np.all(np.abs(contrib) < (np.abs(total) + _TINY) * _EPS):
            break
    return total - _EULER_GAMMA - np.log(x)


def _e1_lentz_fraction(x: np.ndarray) -> np.ndarray:
    """The continued fraction 1/(x + 1 - 1/(x + 3 - 4/(x + 5 - ...))), i.e. e^x E1(x)."""
    b = x + 1.0
    c = np.full_like(x, 1.0 / _TINY)
    d = 1.0 / b
    h = d.copy()
    live = np.arange(x.size)
    for i in range(1, _MAX_ITER + 1):
        an = -float(i) * float(i)
        bl = b[live] + 2.0
        b[live] = bl
        dl = an * d[live] + bl
        dl = np.where(np.abs(dl) < _TINY, _TINY, dl)
        cl = bl + an / c[live]
        cl = np.where(np.abs(cl) < _TINY, _TINY, cl)
        dl = 1.0 / dl
        delta = dl * cl
        c[live] = cl
        d[live] = dl
        h[live] *= delta
        conv = np.abs(delta - 1.0) < _EPS
        live = live[~conv]
        if live.size == 0:
            break
    return h


def _e1_contfrac(x: np.ndarray) -> np.ndarray:
    """E1(x) = e^-x * Lentz fraction, valid for x > 1."""
    return np.exp(-x) * _e1_lentz_fraction(x)
