"""Classical and normalized Whittaker functions with L^2 utilities.

The normalized functions carry the Gamma-factor normalization making the
family {W~_{q/2,nu} : q in Z} orthonormal in L^2(R^x, d^x y) for fixed
admissible nu.  Evaluation routes for the classical W: a terminating
Laguerre closed form in the discrete-series range, the K-Bessel relation
at kappa = 0, and mpmath's confluent-hypergeometric implementation
otherwise; the chosen route is reported alongside the value.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import mpmath as mp
import numpy as np
from scipy.special import kv as _scipy_kv

from .quadrature import log_axis_grid

_TWO_PI = 2 * math.pi


class WhittakerDomainError(ValueError):
    """Parameters outside every implemented evaluation route."""


def _is_int(x: float, tol: float = 1e-12) -> bool:
    return abs(x - round(x)) < tol


def _nu_class(nu: complex) -> str:
    """One of 'imag', 'half_int', 'int', 'small_real'."""
    if abs(nu.real) < 1e-14:
        return "imag"
    if abs(nu.imag) > 1e-14:
        raise WhittakerDomainError(f"nu = {nu} is neither real nor imaginary")
    r = nu.real
    if _is_int(r - 0.5):
        return "half_int"
    if _is_int(r):
        return "int"
    if -0.5 < r < 0.5:
        return "small_real"
    raise WhittakerDomainError(f"real nu = {r} outside (-1/2,1/2) and Z/2")


def nu_admissible(q: int, nu: complex) -> bool:
    try:
        cls = _nu_class(complex(nu))
    except WhittakerDomainError:
        return False
    if q % 2 == 0:
        return cls in ("imag", "half_int", "small_real") or nu == 0
    return cls in ("imag", "int")


@dataclass(frozen=True)
class WhittakerSpec:
    """Weight vector q and spectral parameter nu, one entry per place."""

    q: tuple[int, ...]
    nu: tuple[complex, ...]

    def __post_init__(self):
        if len(self.q) != len(self.nu):
            raise ValueError("q and nu must have equal length")
        for qj, nuj in zip(self.q, self.nu):
            if not nu_admissible(qj, nuj):
                raise WhittakerDomainError(f"(q, nu) = ({qj}, {nuj}) inadmissible")


def _laguerre_value(n: int, alpha: complex, x: float) -> complex:
    """Generalized Laguerre polynomial L_n^(alpha)(x) by recurrence."""
    if n == 0:
        return 1.0 + 0j
    lm, l = 1.0 + 0j, 1 + alpha - x
    for k in range(1, n):
        lm, l = l, ((2 * k + 1 + alpha - x) * l - (k + alpha) * lm) / (k + 1)
    return l


def whittaker_w(kappa: float, mu: complex, x: float) -> tuple[complex, str]:
    """Classical Whittaker W_{kappa,mu}(x) for x > 0 with its route tag."""
    if x <= 0:
        raise WhittakerDomainError("x must be positive")
    mu = complex(mu)
    # terminating (discrete-series) cases: 1/2 + mu' - kappa = -n, mu' = +-mu
    for m in (mu, -mu):
        if abs(m.imag) < 1e-14:
            a = 0.5 + m.real - kappa
            if _is_int(a) and round(a) <= 0 and -round(a) <= 60:
                n = -int(round(a))
                sign = (-1) ** n
                val = (
                    cmath.exp(-x / 2)
                    * x ** (m.real + 0.5)
                    * sign
                    * math.factorial(n)
                    * _laguerre_value(n, 2 * m.real, x)
                )
                return val, "laguerre"
    if kappa == 0:
        if abs(mu.imag) < 1e-14:
            val = math.sqrt(x / math.pi) * float(_scipy_kv(mu.real, x / 2))
            return val, "kbessel"
        val = math.sqrt(x / math.pi) * complex(mp.besselk(mu, x / 2))
        return val, "kbessel"
    return complex(mp.whitw(kappa, mu, x)), "mpmath"


def _gamma_pair(m: float, nu: complex) -> Optional[float]:
    """Gamma(1/2-nu+m)*Gamma(1/2+nu+m) as a positive real, or None if a
    factor sits at a nonpositive-integer pole (value 0 convention)."""
    for s in (+1, -1):
        arg = 0.5 + s * nu + m
        if abs(arg.imag) < 1e-13 and _is_int(arg.real) and round(arg.real) <= 0:
            return None
    p = complex(mp.gamma(0.5 - nu + m)) * complex(mp.gamma(0.5 + nu + m))
    if abs(p.imag) > 1e-8 * abs(p) or p.real <= 0:
        raise WhittakerDomainError(f"Gamma product not positive at m={m}, nu={nu}")
    return p.real


def normalized_whittaker_1d(q: int, nu: complex, y: float) -> complex:
    """W~_{q/2, nu}(y) at a single real place, y != 0."""
    if y == 0:
        raise WhittakerDomainError("y must be nonzero")
    if not nu_admissible(q, nu):
        raise WhittakerDomainError(f"(q, nu) = ({q}, {nu}) inadmissible")
    sgn = 1 if y > 0 else -1
    m = sgn * q / 2
    p = _gamma_pair(m, complex(nu))
    if p is None:
        return 0.0
    x = 4 * math.pi * abs(y)
    w, _ = whittaker_w(m, nu, x)
    phase = cmath.exp(1j * math.pi * sgn * q / 4)
    return phase * w / math.sqrt(p)


def normalized_whittaker(spec: WhittakerSpec, y: Sequence[float]) -> complex:
    """Product over places, per the product convention for K_infinity."""
    if len(y) != len(spec.q):
        raise ValueError("y must have one coordinate per place")
    out = 1.0 + 0j
    for qj, nuj, yj in zip(spec.q, spec.nu, y):
        out *= normalized_whittaker_1d(qj, nuj, yj)
        if out == 0:
            return 0.0
    return out


# ---------------------------------------------------------------------------
# L^2 pairings on R^x


_GRID_CACHE: dict[tuple, np.ndarray] = {}


def _cached_values(q: int, nu: complex, sign: int, u_lo: float, u_hi: float, h: float):
    """W~_{q/2,nu}(sign * y) on the log grid.

    The vector depends on (q, sign) only through m = sign*q/2, so grids are
    cached per m and shared between (q, +) and (-q, -)."""
    m = sign * q / 2
    key = (m, complex(nu), u_lo, u_hi, h)
    if key not in _GRID_CACHE:
        ys, _ = log_axis_grid(u_lo, u_hi, h)
        p = _gamma_pair(m, complex(nu))
        if p is None:
            out = np.zeros(len(ys), dtype=complex)
        else:
            phase = cmath.exp(1j * math.pi * m / 2)
            out = np.empty(len(ys), dtype=complex)
            for i, y in enumerate(ys):
                w, _ = whittaker_w(m, nu, 4 * math.pi * y)
                out[i] = phase * w / math.sqrt(p)
        _GRID_CACHE[key] = out
    return _GRID_CACHE[key]


def whittaker_inner(
    q: int,
    q2: int,
    nu: complex,
    tol: float = 1e-6,
    u_lo: float = -26.0,
    u_hi: float = 4.2,
    h: float = 0.04,
) -> float:
    """<W~_{q/2,nu}, W~_{q2/2,nu}> over R^x by trapezoid on the log axis.

    The rule is nested, so comparing against the doubled step gives a
    convergence certificate; failure raises.
    """
    ys, w = log_axis_grid(u_lo, u_hi, h)
    total = 0.0 + 0j
    coarse = 0.0 + 0j
    for sign in (+1, -1):
        f = _cached_values(q, nu, sign, u_lo, u_hi, h)
        g = _cached_values(q2, nu, sign, u_lo, u_hi, h)
        prod = f * np.conj(g)
        total += np.sum(prod * w)
        coarse += 2 * h * (
            np.sum(prod[::2]) - 0.5 * prod[0] - (0.5 * prod[-1] if len(prod) % 2 else 0)
        )
    if abs(total - coarse) > 10 * tol:
        raise WhittakerDomainError(
            f"quadrature not converged: |I_h - I_2h| = {abs(total - coarse):.2e}"
        )
    # the pairing is real; residual imaginary parts are quadrature noise
    if abs(total.imag) > tol:
        raise WhittakerDomainError(f"imaginary residue {total.imag:.2e} above tol")
    return float(total.real)


def gram_matrix(qs: Sequence[int], nu: complex, **kw) -> np.ndarray:
    """Gram matrix of {W~_{q/2,nu} : q in qs} in L^2(R^x, d^x y)."""
    n = len(qs)
    G = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            G[i, j] = G[j, i] = whittaker_inner(qs[i], qs[j], nu, **kw)
    return G


# ---------------------------------------------------------------------------
# the A-norm quadrature utility


def _fd_derivative(f: Callable, kappa: int, h: float) -> Callable:
    """Central finite-difference derivative of order kappa (scalar input)."""
    if kappa == 0:
        return f
    coeffs = [(-1) ** i * math.comb(kappa, i) for i in range(kappa + 1)]

    def df(y: float) -> complex:
        s = 0.0
        for i, c in enumerate(coeffs):
            s += c * f(y + (kappa / 2 - i) * h)
        return s / h**kappa

    return df


def a_norm(
    W: Callable,
    mu: int,
    d: int = 1,
    derivative_supplier: Optional[Callable[[tuple[int, ...]], Callable]] = None,
    fd_step: float = 1e-3,
    u_lo: float = -20.0,
    u_hi: float = 8.0,
    h: float = 0.01,
    negative_axis: bool = False,
) -> float:
    """The A^mu norm of W on (R^x)^d per the Sobolev-type definition:
    sum over mu_1+..+mu_d <= mu and kappa_j <= mu_j of the weighted L^2
    norms of the partial derivatives, weights prod (|y|+1/|y|)^(mu_j).

    Derivatives come from the supplier when given, else from central
    finite differences with the documented step.  d <= 2.
    """
    if d not in (1, 2):
        raise ValueError("a_norm implemented for d <= 2")
    ys, wts = log_axis_grid(u_lo, u_hi, h)
    signs = [(1,), (-1,)] if negative_axis else [(1,)]
    if d == 2:
        signs = [(s1, s2) for s1 in (1, -1) for s2 in (1, -1)] if negative_axis else [(1, 1)]

    def deriv(kappa: tuple[int, ...]) -> Callable:
        if derivative_supplier is not None:
            g = derivative_supplier(kappa)
            if g is not None:
                return g
        if d == 1:
            return _fd_derivative(lambda y: W(y), kappa[0], fd_step)
        fy = lambda y1, y2: W(y1, y2)
        g1 = lambda y2: _fd_derivative(lambda y1: fy(y1, y2), kappa[0], fd_step)
        return lambda y1, y2: _fd_derivative(lambda t2: g1(t2)(y1), kappa[1], fd_step)(y2)

    total = 0.0
    weight_pow = {}
    for mus in _compositions(mu, d):
        for kappas in _boxed(mus):
            sq = 0.0
            dW = deriv(kappas)
            for sgn in signs:
                if d == 1:
                    vals = np.array([dW(sgn[0] * y) for y in ys])
                    wt = (ys + 1 / ys) ** mus[0]
                    sq += float(np.sum(np.abs(vals) ** 2 * wt * wts))
                else:
                    v = np.array(
                        [[dW(sgn[0] * y1, sgn[1] * y2) for y2 in ys] for y1 in ys]
                    )
                    wt1 = (ys + 1 / ys) ** mus[0]
                    wt2 = (ys + 1 / ys) ** mus[1]
                    sq += float(
                        np.sum(np.abs(v) ** 2 * np.outer(wt1 * wts, wt2 * wts))
                    )
            if not math.isfinite(sq):
                raise WhittakerDomainError("divergent A-norm integrand")
            total += math.sqrt(sq)
    return total


def _compositions(mu: int, d: int):
    """All (mu_1..mu_d) with nonnegative entries summing to <= mu."""
    if d == 1:
        for m in range(mu + 1):
            yield (m,)
    else:
        for m1 in range(mu + 1):
            for m2 in range(mu + 1 - m1):
                yield (m1, m2)


def _boxed(mus: tuple[int, ...]):
    """All kappa with 0 <= kappa_j <= mu_j."""
    if len(mus) == 1:
        for k in range(mus[0] + 1):
            yield (k,)
    else:
        for k1 in range(mus[0] + 1):
            for k2 in range(mus[1] + 1):
                yield (k1, k2)
