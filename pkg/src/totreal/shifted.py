"""Shifted convolution sums, their Dirichlet series in the convergence
region, the unit fundamental domain, and the amplified second-moment
(Plancherel) experiment.

Only left-hand sides are assembled here: the spectral right-hand sides
would require the full cuspidal spectrum, which is not computable in this
toolkit.  The Eisenstein ingredients live in the eisenstein module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .fields import (
    FieldDesc,
    Ideal,
    RingElement,
    enumerate_in_box,
    factor_ideal,
    ideals_of_norm_up_to,
    residue_system,
    unit_reduced_generator,
)
from .characters import HeckeCharacter, characters_mod
from .spectral import EigenvalueSystem


class SmoothBump:
    """C^infty bump on (a, b): exp(1 - 1/(1 - z^2)), z the affine map to
    (-1, 1); value 0 outside.  Derivatives by central differences with the
    documented step (1e-4 of the support width)."""

    def __init__(self, a: float, b: float):
        if not a < b:
            raise ValueError("need a < b")
        if a < 0 < b or a == 0 or b == 0:
            raise ValueError("support must avoid 0 (weight lives on R^x)")
        self.a, self.b = float(a), float(b)
        self.fd_step = 1e-4 * (b - a)

    def __call__(self, y: float) -> float:
        if not self.a < y < self.b:
            return 0.0
        z = (2 * y - self.a - self.b) / (self.b - self.a)
        return math.exp(1 - 1 / (1 - z * z))

    def derivative(self, order: int) -> Callable[[float], float]:
        if order == 0:
            return self
        h = self.fd_step
        coeffs = [(-1) ** i * math.comb(order, i) for i in range(order + 1)]

        def df(y: float) -> float:
            return sum(
                c * self(y + (order / 2 - i) * h) for i, c in enumerate(coeffs)
            ) / h**order

        return df


class ProductWeight:
    """Product of per-place bumps, a compactly supported weight on K_inf^x."""

    def __init__(self, factors: Sequence[SmoothBump]):
        self.factors = list(factors)
        self.support = [(f.a, f.b) for f in self.factors]

    def __call__(self, y: Sequence[float]) -> float:
        out = 1.0
        for f, yj in zip(self.factors, y):
            out *= f(yj)
            if out == 0.0:
                return 0.0
        return out


@dataclass
class ShiftedQuery:
    """Data of a shifted convolution sum over the ideal lattice y."""

    sys1: EigenvalueSystem
    sys2: EigenvalueSystem
    l1: RingElement
    l2: RingElement
    y: Ideal
    q: RingElement
    Y: tuple[float, ...]
    W1: ProductWeight
    W2: ProductWeight

    def __post_init__(self):
        K = self.l1.field
        if not (self.l1.is_totally_positive() and self.l2.is_totally_positive()):
            raise ValueError("shifts must be totally positive")
        if self.q.is_zero():
            raise ValueError("q must be nonzero")
        if len(self.Y) != K.d:
            raise ValueError("Y must have one entry per place")


def shifted_sum(query: ShiftedQuery) -> complex:
    """Sum over l1 r1 - l2 r2 = q, r's nonzero in y, of
    lambda1(r1 y^-1) conj(lambda2(r2 y^-1)) / sqrt(N(r1 r2 y^-2))
    * W1(l1 r1 / Y) conj(W2(l2 r2 / Y))."""
    K = query.l1.field
    y = query.y
    if not y.contains(query.q):
        return 0.0  # the summation condition is unsatisfiable
    l1e = query.l1.embeddings()
    # r1 box from the support of W1
    box = []
    for j in range(K.d):
        a, b = query.W1.support[j]
        lo = Fraction(a * query.Y[j] / l1e[j]).limit_denominator(10**12)
        hi = Fraction(b * query.Y[j] / l1e[j]).limit_denominator(10**12)
        box.append((min(lo, hi), max(lo, hi)))
    ny = float(y.norm())
    out = 0.0 + 0j
    for r1 in enumerate_in_box(y, box):
        if r1.is_zero():
            continue
        r2 = (query.l1 * r1 - query.q) / query.l2
        if r2.is_zero() or not y.contains(r2):
            continue
        w1 = query.W1([e / Y for e, Y in zip((query.l1 * r1).embeddings(), query.Y)])
        if w1 == 0.0:
            continue
        w2 = query.W2([e / Y for e, Y in zip((query.l2 * r2).embeddings(), query.Y)])
        if w2 == 0.0:
            continue
        I1 = Ideal.principal(r1) * y.inverse()
        I2 = Ideal.principal(r2) * y.inverse()
        lam = query.sys1.lambda_value(I1) * query.sys2.lambda_value(I2).conjugate()
        out += lam / math.sqrt(float(I1.norm() * I2.norm())) * w1 * w2
    return out


def shifted_sum_scalar_oracle(
    sys1: EigenvalueSystem,
    sys2: EigenvalueSystem,
    q: int,
    Y: float,
    W1: SmoothBump,
    W2: SmoothBump,
    l1: int = 1,
    l2: int = 1,
) -> complex:
    """Independent double loop over the rational integers (d = 1 oracle)."""
    K = sys1.field
    out = 0.0 + 0j
    n_hi = int(W1.b * Y / l1) + 1
    for n in range(1, n_hi + 1):
        m2 = l1 * n - q
        if m2 == 0 or m2 % l2:
            continue
        m = m2 // l2
        w = W1(l1 * n / Y) * W2(l2 * m / Y)
        if w == 0.0:
            continue
        lam = (
            sys1.lambda_value(K.ideal(n))
            * sys2.lambda_value(K.ideal(abs(m))).conjugate()
        )
        out += lam / math.sqrt(n * abs(m)) * w
    return out


# ---------------------------------------------------------------------------
# Dirichlet series of the shifted convolution


def dirichlet_D(
    sys1: EigenvalueSystem,
    sys2: EigenvalueSystem,
    l1: RingElement,
    l2: RingElement,
    y: Ideal,
    q: RingElement,
    s: Sequence[complex],
    beta: int,
    trace_height: float = 400.0,
) -> dict:
    """The Dirichlet series of the shifted convolution in its region of
    absolute convergence Re s_j > 1, truncated by trace height with a
    reported tail bound.  beta below the continuation threshold d*66 is
    allowed but flagged."""
    K = l1.field
    d = K.d
    if len(s) != d:
        raise ValueError("s must have one entry per place")
    if any(z.real <= 1 for z in s):
        raise ValueError("evaluation requires Re s_j > 1 (absolute convergence)")
    if beta % 2:
        raise ValueError("beta must be even")
    warn = beta <= d * 66
    if not q.is_totally_positive():
        raise ValueError("q must be totally positive for the positive cone sum")

    def term_value(r1: RingElement, r2: RingElement) -> complex:
        I1 = Ideal.principal(r1) * y.inverse()
        I2 = Ideal.principal(r2) * y.inverse()
        lam = sys1.lambda_value(I1) * sys2.lambda_value(I2).conjugate()
        x = (l1 * r1).embeddings()
        z = (l2 * r2).embeddings()
        nprod = abs(float((l1 * r1 * l2 * r2).norm()))
        out = lam * nprod ** ((beta - 1) / 2)
        for j in range(d):
            out /= (x[j] + z[j]) ** (s[j] + beta - 1)
        return out

    def term_bound(r1: RingElement, r2: RingElement) -> float:
        I1 = Ideal.principal(r1) * y.inverse()
        I2 = Ideal.principal(r2) * y.inverse()
        t1 = _tau(I1) * float(I1.norm()) ** sys1.theta
        t2 = _tau(I2) * float(I2.norm()) ** sys2.theta
        x = (l1 * r1).embeddings()
        z = (l2 * r2).embeddings()
        nprod = abs(float((l1 * r1 * l2 * r2).norm()))
        out = t1 * t2 * nprod ** ((beta - 1) / 2)
        for j in range(d):
            out /= (x[j] + z[j]) ** (s[j].real + beta - 1)
        return out

    def solutions(hmax: float, hmin: float = 0.0):
        box = []
        for j in range(d):
            box.append((Fraction(0), Fraction(hmax / l1.embeddings()[j]).limit_denominator(10**9)))
        for r1 in enumerate_in_box(y, box, totally_positive=True):
            tr = float((l1 * r1).trace())
            if tr > hmax or tr <= hmin - 1e-12:
                continue
            r2 = (l1 * r1 - q) / l2
            if r2.is_zero() or not y.contains(r2):
                continue
            if not r2.is_totally_positive():
                continue
            yield r1, r2

    total = 0.0 + 0j
    for r1, r2 in solutions(trace_height):
        total += term_value(r1, r2)
    # tail: bound the next dyadic shell by |lambda| <= tau N^theta and
    # extrapolate geometrically with the observed shell decay
    shell1 = sum(term_bound(r1, r2) for r1, r2 in solutions(2 * trace_height, trace_height))
    shell2 = sum(
        term_bound(r1, r2) for r1, r2 in solutions(4 * trace_height, 2 * trace_height)
    )
    ratio = 0.75 if shell1 == 0 else min(0.75, shell2 / shell1)
    tail = shell1 / (1 - ratio) if shell1 else shell2 / (1 - ratio)
    return {
        "value": total,
        "tail_bound": tail,
        "trace_height": trace_height,
        "beta_warning": warn,
    }


_TAU_CACHE: dict[tuple, int] = {}


def _tau(I: Ideal) -> int:
    key = (I.field.D,) + I.key()
    if key not in _TAU_CACHE:
        t = 1
        for _, e in factor_ideal(I):
            t *= e + 1
        _TAU_CACHE[key] = t
    return _TAU_CACHE[key]


# ---------------------------------------------------------------------------
# fundamental domain for the totally positive unit action


def fd_reduce(K: FieldDesc, y: Sequence[float]) -> tuple[RingElement, list[float]]:
    """Reduce a totally positive vector into the unit fundamental domain.

    Returns (u, u*y) with u in U^+ and the log-coordinates of
    u*y / (N y)^(1/d) inside the half-open fundamental parallelotope.
    """
    y = [float(v) for v in y]
    if any(v <= 0 for v in y):
        raise ValueError("fd_reduce needs totally positive coordinates")
    if K.d == 1:
        return K.one(), y
    u_gen = K.totally_positive_unit_gens()[0]
    le = math.log(u_gen.embeddings()[0])
    z = math.log(y[0]) - (math.log(y[0]) + math.log(y[1])) / 2
    t = z / le
    kfl = math.floor(t)
    u = K.one()
    g = u_gen if kfl < 0 else u_gen.inverse()
    for _ in range(abs(kfl)):
        u = u * g
    emb = u.embeddings()
    return u, [emb[j] * y[j] for j in range(K.d)]


def fd_contains(K: FieldDesc, y: Sequence[float]) -> bool:
    u, _ = fd_reduce(K, y)
    return u == K.one()


def fd_log_coordinate(K: FieldDesc, y: Sequence[float]) -> float:
    """Position in [0, 1) within the fundamental parallelotope (d = 2)."""
    if K.d == 1:
        return 0.0
    u_gen = K.totally_positive_unit_gens()[0]
    le = math.log(u_gen.embeddings()[0])
    z = math.log(y[0]) - (math.log(y[0]) + math.log(y[1])) / 2
    return (z / le) % 1.0


# ---------------------------------------------------------------------------
# amplified second moment (the Plancherel identity experiment)


def _amplifier_primes(K: FieldDesc, q: Ideal, L: float) -> list[RingElement]:
    """Totally positive prime-ideal generators, reduced into F, with norm
    in [L, 2L] and coprime to q."""
    out = []
    for I in ideals_of_norm_up_to(K, int(2 * L)):
        n = int(I.norm())
        if n < L or n > 2 * L or n == 1:
            continue
        fac = factor_ideal(I)
        if len(fac) != 1 or fac[0][1] != 1:
            continue
        if q.norm() > 1 and (I + q).norm() != 1:
            continue
        g = unit_reduced_generator(I)
        if not g.is_totally_positive():
            g = -g if (-g).is_totally_positive() else g
        if not g.is_totally_positive():
            continue  # no totally positive generator exists
        # reduce into the fundamental domain
        u, _ = fd_reduce(K, g.embeddings())
        out.append(u * g)
    return out


def amplified_moment(
    q: Ideal,
    L: float,
    sys: EigenvalueSystem,
    chi: HeckeCharacter,
    V: SmoothBump,
    Y: float,
    y: Optional[Ideal] = None,
) -> dict:
    """Both sides of the amplified-moment rearrangement.

    Side A sums |L_xi|^2 |amplifier(xi)|^2 over all finite characters xi
    mod q; side B is the Plancherel rearrangement phi(q) * sum over
    residues x of |inner sum over r in the class x ell^{-1}|^2.  The two
    are equal as finite sums; the report also isolates the diagonal
    l1 r1 = l2 r2 contribution of side B.
    """
    K = q.field
    if K.h != 1:
        raise ValueError("amplified moment requires h = 1")
    if y is None:
        y = K.unit_ideal()
    ells = _amplifier_primes(K, q, L)
    if not ells:
        raise ValueError(f"no amplifier primes with norm in [{L}, {2*L}]")
    # weighted r-sum support: totally positive r in y, F-reduced, N r <= 2Y
    if K.d == 1:
        B = Fraction(2 * Y).limit_denominator(10**9)
        box = [(Fraction(0), B)]
    else:
        eps_plus = K.totally_positive_unit_gens()[0].embeddings()[0]
        B = Fraction(math.sqrt(2 * Y * eps_plus) + 1).limit_denominator(10**9)
        box = [(Fraction(0), B), (Fraction(0), B)]
    rs = []
    for r in enumerate_in_box(y, box, totally_positive=True):
        w = V(abs(float(r.norm())) / Y)
        if w == 0.0:
            continue
        if K.d == 2 and not fd_contains(K, r.embeddings()):
            continue
        I = Ideal.principal(r) * y.inverse()
        lam = sys.lambda_value(I)
        rs.append((r, lam / math.sqrt(float(I.norm())) * w))
    chars = characters_mod(q)
    rsys = residue_system(q)
    # side A
    chi_fin = chi.finite
    amp_coeffs = []
    for ell in ells:
        cf = 1.0 + 0j
        if chi_fin is not None:
            v = chi_fin(ell)
            cf = v.conjugate() if v != 0 else 0.0
        amp_coeffs.append(cf)
    A = 0.0
    for xi in chars:
        Lxi = sum(w * xi(r) for r, w in rs)
        amp = sum(c * xi(ell) for ell, c in zip(ells, amp_coeffs))
        A += abs(Lxi) ** 2 * abs(amp) ** 2
    # side B via Plancherel: phi(q) * sum_x |c_x|^2,
    # c_x = sum_ell conj(chi)(ell) sum_{r = x ell^{-1} (q)} w(r)
    phi_q = rsys.phi
    cx: dict[tuple, complex] = {}
    for ell, cf in zip(ells, amp_coeffs):
        if cf == 0:
            continue
        for r, w in rs:
            if q.norm() > 1:
                rr = rsys.reduce(r)
                if rr.coords() not in rsys._index:
                    continue  # r not coprime to q contributes zero
                # bucket by x = r * ell mod q  <=>  r = x ell^{-1} (q)
                xclass = rsys.reduce(rr * ell).coords()
            else:
                xclass = (0, 0)
            cx[xclass] = cx.get(xclass, 0.0 + 0j) + cf * w
    B = phi_q * sum(abs(v) ** 2 for v in cx.values())
    # diagonal l1 r1 = l2 r2 extraction (pair scan)
    diag_val = 0.0
    diag_count = 0
    for i1, (ell1, c1) in enumerate(zip(ells, amp_coeffs)):
        for i2, (ell2, c2) in enumerate(zip(ells, amp_coeffs)):
            for r1, w1 in rs:
                for r2, w2 in rs:
                    if ell1 * r1 == ell2 * r2:
                        if q.norm() > 1:
                            rr = rsys.reduce(r1)
                            if rr.coords() not in rsys._index:
                                continue
                        diag_count += 1
                        diag_val += (c1 * w1 * (c2 * w2).conjugate()).real
    diag_val *= phi_q
    rel = abs(A - B) / max(abs(A), abs(B), 1e-300)
    return {
        "A": A,
        "B": B,
        "relative_difference": rel,
        "n_amplifier_primes": len(ells),
        "n_r_terms": len(rs),
        "diagonal": diag_val,
        "diagonal_count": diag_count,
        "off_diagonal": B - diag_val,
    }


def afe_sum(
    sys: EigenvalueSystem, chi: HeckeCharacter, Y: float, V: SmoothBump
) -> complex:
    """The smoothed central-value sum: sum over integral ideals of
    lambda(m) chi(m) / sqrt(N m) * V(N m / Y); exact finite sum for a
    compactly supported V."""
    K = sys.field
    hi = int(math.floor(V.b * Y))
    if hi < 1:
        return 0.0
    out = 0.0 + 0j
    for m in ideals_of_norm_up_to(K, hi):
        n = float(m.norm())
        w = V(n / Y)
        if w == 0.0:
            continue
        out += sys.lambda_value(m) * chi.eval_on_ideal(m) / math.sqrt(n) * w
    return out
