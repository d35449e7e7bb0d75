"""Imaginary-order Bessel kernels for the Kuznetsov transforms.

The spectral-to-geometric transforms need, for u >= 0 and x > 0,

    RJ(u, x) = Im J_{2iu}(x) / cosh(pi u)          (t > 0 side),
    WK(u, x) = sinh(pi u) * K_{2iu}(x)             (t < 0 side).

Both are small smooth oscillating functions, while J_{2iu}(x) itself grows
like e^{pi u} and K_{2iu}(x) decays like e^{-pi u}; naive evaluation loses
e^{pi u} of precision.  The exponential factors are removed analytically:

* RJ via the Mehler-Sonine representation
      Im J_{2iu}(x) = -(2/pi) sinh(pi u) C(u, x),
      C(u, x) = int_0^inf cos(x cosh s) cos(2 u s) ds,
  with the conditionally convergent C evaluated by rotating the contour
  upward at s1 = arcsinh((pi u + M)/x), after which every piece is O(1).
  For small x the direct power series is stable and cheaper.

* WK via a contour shifted to Im s = pi/2 - eps, which turns the factor
  e^{-pi u} into an explicit prefactor; for x >= pi u - 13 the real-axis
  integral is already stable.

Everything is vectorized over the quadrature nodes in s; mpmath is used
only in the test oracles.
"""

from __future__ import annotations

import math

import numpy as np

from .quadrature import gl_panels

_M = 30.0  # contour-shift margin: e^{-M} bounds the neglected horizontal piece


def _series_RJ(u: np.ndarray, x: float) -> np.ndarray:
    """Im J_{2iu}(x)/cosh(pi u) by the power series; stable for x <= 14."""
    from scipy.special import gamma as cgamma

    nu = 2j * u
    # term_0 = (x/2)^{2iu} / Gamma(1 + 2iu); ratio_{k+1/k} = -(x/2)^2/((k+1)(nu+k+1))
    t = np.exp(nu * math.log(x / 2)) / cgamma(1 + nu)
    total = t.copy()
    q = (x / 2) ** 2
    kmax = int(x + 25 + 10 * math.sqrt(x))
    for k in range(kmax):
        t = -t * q / ((k + 1) * (nu + k + 1))
        total += t
    return np.imag(total) / np.cosh(math.pi * u)


def _contour_C(u: float, x: float) -> float:
    """C(u,x) = int_0^inf cos(x cosh s) cos(2us) ds via the rotated contour."""
    A = math.pi * u + _M
    s1 = math.asinh(A / x)
    # real segment [0, s1]: oscillation density x sinh s + 2u
    total_phase = x * math.sinh(s1) + 2 * u * s1 + 8.0
    n_panels = max(2, int(total_phase / 4.0))
    s, w = gl_panels(0.0, s1, n_panels, order=12)
    seg1 = float(np.sum(w * np.cos(x * np.cosh(s)) * np.cos(2 * u * s)))
    # vertical segment: Re V = -int_0^{pi/2} e^{-A sin(sg)} *
    #   [sin(phc) cos(2us1) cosh(2u sg) - cos(phc) sin(2us1) sinh(2u sg)] d sg
    ch1 = x * math.cosh(s1)
    n_panels = max(2, int((ch1 + 2 * u + 8.0) / 4.0))
    sg, wv = gl_panels(0.0, math.pi / 2, n_panels, order=12)
    e_plus = np.exp(2 * u * sg - A * np.sin(sg))
    e_minus = np.exp(-2 * u * sg - A * np.sin(sg))
    phc = ch1 * np.cos(sg)
    band = np.sin(phc) * math.cos(2 * u * s1) * 0.5 * (e_plus + e_minus) - np.cos(
        phc
    ) * math.sin(2 * u * s1) * 0.5 * (e_plus - e_minus)
    segv = -float(np.sum(wv * band))
    # horizontal tail: Re H = int_{s1}^{smax} e^{pi u - x sinh s} *
    #   (1 + e^{-2 pi u})/2 * cos(2us) ds, bounded by e^{-M}
    smax = math.asinh(math.sinh(s1) + 45.0 / x)
    n_panels = max(2, int((2 * u * (smax - s1) + 8.0) / 4.0))
    s, wh = gl_panels(s1, smax, n_panels, order=12)
    ex = math.pi * u - x * np.sinh(s)
    segh = float(
        np.sum(wh * np.exp(ex) * np.cos(2 * u * s)) * 0.5 * (1 + math.exp(-2 * math.pi * u))
    )
    return seg1 + segv + segh


def rj_kernel(u: np.ndarray, x: float) -> np.ndarray:
    """RJ(u, x) = Im J_{2iu}(x)/cosh(pi u) for an array of u >= 0."""
    u = np.asarray(u, dtype=float)
    if x <= 14.0:
        return _series_RJ(u, x)
    out = np.empty_like(u)
    for i, ui in enumerate(u):
        out[i] = -(2 / math.pi) * math.tanh(math.pi * ui) * _contour_C(float(ui), x)
    return out


def _series_WK(u: np.ndarray, x: float) -> np.ndarray:
    """sinh(pi u) K_{2iu}(x) from K = -pi Im I_{2iu}(x) / sinh(2 pi u);
    the I-series is stable for small x (loss ~ e^{2x})."""
    from scipy.special import gamma as cgamma

    nu = 2j * u
    t = np.exp(nu * math.log(x / 2)) / cgamma(1 + nu)
    total = t.copy()
    q = (x / 2) ** 2
    kmax = int(x + 25 + 10 * math.sqrt(x))
    for k in range(kmax):
        t = t * q / ((k + 1) * (nu + k + 1))
        total += t
    # sinh(pi u) K = -pi Im I / (2 cosh(pi u))
    return -math.pi * np.imag(total) / (2 * np.cosh(math.pi * u))


def _wk_direct(u: float, x: float) -> float:
    """sinh(pi u) K_{2iu}(x) by the real-axis integral; needs x >= pi u - 6."""
    tmax = math.acosh(1.0 + (45.0 + max(0.0, math.pi * u - x)) / x)
    n_panels = max(2, int((2 * u * tmax + 8.0) / 4.0) + int(tmax) + 1)
    t, w = gl_panels(0.0, tmax, n_panels, order=12)
    ex = math.pi * u - x * np.cosh(t)
    vals = np.exp(ex) * np.cos(2 * u * t)
    return float(np.sum(w * vals) * 0.5 * (1 - math.exp(-2 * math.pi * u)))


def _wk_shifted(u: float, x: float) -> float:
    """sinh(pi u) K_{2iu}(x) via the contour Im s = pi/2 - eps (large u)."""
    eps = min(math.pi / 4, 2.0 / max(u, 1.0))
    sig = math.pi / 2 - eps
    # K = e^{-2 u sig} * Re int_0^inf e^{-x cosh(s + i sig)} e^{2ius} ds
    # (the two half-lines are complex conjugates); envelope e^{-x sin eps cosh s}
    a = x * math.sin(eps)
    smax = math.acosh((45.0 + 2 * abs(math.log(max(u, 2)))) / a + 1.0)
    freq = x * math.cos(eps) * math.cosh(smax) + 2 * u
    n_panels = max(4, int((freq * smax + 8.0) / 5.0))
    if n_panels > 4000:  # pragma: no cover - desk-scale guard
        n_panels = 4000
    s, w = gl_panels(0.0, smax, n_panels, order=12)
    re_arg = -a * np.cosh(s)
    im_arg = -x * math.cos(eps) * np.sinh(s) + 2 * u * s
    integral = np.sum(w * np.exp(re_arg) * np.cos(im_arg))
    pref = (1 - math.exp(-2 * math.pi * u)) * 0.5 * math.exp(2 * u * eps)
    return float(pref * integral)


def wk_kernel(u: np.ndarray, x: float) -> np.ndarray:
    """WK(u, x) = sinh(pi u) K_{2iu}(x) for an array of u >= 0."""
    u = np.asarray(u, dtype=float)
    if x <= 5.5:
        return _series_WK(u, x)
    out = np.empty_like(u)
    for i, ui in enumerate(u):
        ui = float(ui)
        if x >= math.pi * ui - 6.0:
            out[i] = _wk_direct(ui, x)
        else:
            out[i] = _wk_shifted(ui, x)
    return out


def rj_bound(u: np.ndarray, x: float) -> np.ndarray:
    """Proven majorant of |RJ(u, x)| from the contour pieces."""
    u = np.asarray(u, dtype=float)
    s1 = np.arcsinh((math.pi * u + _M) / x)
    return (2 / math.pi) * np.tanh(math.pi * np.maximum(u, 1e-12)) * (s1 + 2.0)


def wk_bound(u: np.ndarray, x: float) -> np.ndarray:
    """Majorant of |WK(u, x)|: (1/2) e^{2 u eps} K_0(x sin eps), optimized
    over the contour tilt eps; K_0(y) <= e^{-y} log(1 + 2/y) + ..."""
    from scipy.special import k0e

    u = np.asarray(u, dtype=float)
    out = np.empty_like(u)
    for i, ui in enumerate(u):
        best = math.inf
        for eps in (math.pi / 2, math.pi / 4, 1.0 / max(ui, 0.5), 2.0 / max(ui, 0.5)):
            if eps > math.pi / 2:
                eps = math.pi / 2
            y = x * math.sin(eps)
            val = 0.5 * math.exp(2 * ui * eps - y) * float(k0e(y))
            best = min(best, val)
        out[i] = best
    return out
