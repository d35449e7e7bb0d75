"""Tests for exact field/ideal arithmetic."""

import cmath
import math
import random
from fractions import Fraction

import pytest

from totreal.fields import (
    BoundExceeded,
    FieldError,
    Ideal,
    arith_functions,
    enumerate_in_box,
    factor_ideal,
    ideal_arith,
    ideals_of_norm_up_to,
    make_field,
    principal_generator,
    psi,
    residue_system,
)

Q = make_field(1)
K5 = make_field(5)
K2 = make_field(2)

# independently known invariants (standard tables) used to pin the
# continued-fraction unit and form-cycle class number routines
KNOWN_H = {2: 1, 3: 1, 5: 1, 6: 1, 7: 1, 10: 2, 11: 1, 13: 1, 14: 1, 15: 2,
           17: 1, 19: 1, 21: 1, 22: 1, 23: 1, 26: 2, 29: 1, 30: 2, 31: 1,
           33: 1, 34: 2, 35: 2, 37: 1, 38: 1, 39: 2, 41: 1, 42: 2, 43: 1,
           46: 1, 47: 1, 51: 2, 53: 1, 55: 2, 57: 1, 58: 2, 59: 1, 61: 1,
           62: 1, 65: 2, 66: 2, 67: 1, 69: 1, 70: 2, 71: 1, 73: 1, 74: 2,
           77: 1, 78: 2, 79: 3, 82: 4, 83: 1, 85: 2, 86: 1, 87: 2, 89: 1,
           91: 2, 93: 1, 94: 1, 95: 2, 97: 1}


def test_rational_field():
    assert Q.d == 1 and Q.disc == 1 and Q.h == 1
    assert Q.different.norm() == 1
    assert Q.units_mod_squares() == [Q.one(), -Q.one()]


def test_field_sqrt5():
    assert K5.disc == 5
    assert K5.eps == K5.omega()  # (1+sqrt5)/2
    assert K5.eps_norm == -1
    assert K5.h == 1
    u = K5.totally_positive_unit_gens()[0]
    assert u == K5.eps * K5.eps
    assert K5.different == Ideal.principal(K5.sqrtD())


def test_field_sqrt2():
    assert K2.disc == 8
    assert K2.eps == K2.element(1, 1)  # 1 + sqrt2
    assert K2.h == 1
    assert K2.different == Ideal.principal(K2.element(0, 2))  # (2 sqrt 2)
    assert K2.different.norm() == 8


def test_field_errors():
    with pytest.raises(FieldError):
        make_field(12)  # not squarefree
    with pytest.raises(FieldError):
        make_field(0)
    with pytest.raises(FieldError):
        make_field(10)  # h = 2
    assert make_field(10, allow_class_number=True).h == 2


def test_class_numbers_against_tables():
    for D, h in KNOWN_H.items():
        K = make_field(D, allow_class_number=True)
        assert K.h == h, f"D={D}: got {K.h}, expected {h}"
        # fundamental unit sanity: > 1, unit norm
        assert K.eps.embeddings()[0] > 1
        assert abs(K.eps.norm()) == 1
        assert K.eps.norm() == K.eps_norm


def test_unit_invariants():
    for D in (2, 3, 5, 13, 61):
        K = make_field(D)
        for u in K.totally_positive_unit_gens():
            assert u.is_totally_positive()
            assert u.norm() == 1
        assert len(K.units_mod_squares()) == 2**K.d


def test_ideal_arith_examples():
    assert ideal_arith(Q.ideal(4), Q.ideal(6), "gcd") == Q.ideal(2)
    assert ideal_arith(Q.ideal(2), Q.ideal(3), "lcm") == Q.ideal(6)
    s5 = Ideal.principal(K5.sqrtD())
    assert ideal_arith(s5, s5, "mul") == K5.ideal(5)
    assert ideal_arith(Q.ideal(2), Q.ideal(6), "divides") is True
    assert ideal_arith(Q.ideal(4), Q.ideal(6), "divides") is False
    with pytest.raises(FieldError):
        ideal_arith(Q.ideal(2), K5.ideal(2), "gcd")


def test_ideal_norm_multiplicative():
    rng = random.Random(7)
    for K in (Q, K5, K2):
        for _ in range(25):
            x = K.element(rng.randint(-9, 9), rng.randint(-9, 9) if K.d == 2 else 0)
            y = K.element(rng.randint(-9, 9), rng.randint(-9, 9) if K.d == 2 else 0)
            if x.is_zero() or y.is_zero():
                continue
            a, b = Ideal.principal(x), Ideal.principal(y)
            assert (a * b).norm() == a.norm() * b.norm()
            g, l = a + b, a.intersect(b)
            assert g.norm() * l.norm() == a.norm() * b.norm()
            assert g.divides(a) and g.divides(b)
            assert a.divides(l) and b.divides(l)


def test_factor_examples():
    fac = factor_ideal(Q.ideal(6))
    assert sorted((P.p, e) for P, e in fac) == [(2, 1), (3, 1)]
    fac2 = factor_ideal(K5.ideal(2))
    assert len(fac2) == 1 and fac2[0][0].f == 2 and fac2[0][0].norm() == 4
    fac11 = factor_ideal(K5.ideal(11))
    assert len(fac11) == 2 and all(P.norm() == 11 for P, _ in fac11)
    # product reconstructs
    for K, n in ((Q, 360), (K5, 90), (K2, 84)):
        I = K.ideal(n)
        prod = K.unit_ideal()
        for P, e in factor_ideal(I):
            for _ in range(e):
                prod = prod * P.ideal
        assert prod == I
    with pytest.raises(BoundExceeded):
        factor_ideal(Q.ideal(10**8))


def test_arith_functions():
    assert arith_functions(Q.ideal(12)) == (0, 4, 6)
    for K, p in ((Q, 7), (Q, 11), (K5, 11)):
        for P, _ in factor_ideal(K.ideal(p)):
            mu, phi, tau = arith_functions(P.ideal)
            assert (mu, phi, tau) == (-1, P.norm() - 1, 2)
    assert arith_functions(K5.ideal(2)) == (-1, 3, 2)


def test_enumerate_box_examples():
    els = enumerate_in_box(K5.unit_ideal(), [(1, 3), (1, 3)])
    assert [e.coords() for e in els] == [(1, 0), (2, 0), (3, 0)]
    assert enumerate_in_box(K5.unit_ideal(), [(2, 1), (0, 1)]) == []
    els2 = enumerate_in_box(Q.ideal(2), [(1, 7)])
    assert [int(e.a) for e in els2] == [2, 4, 6]


def test_enumerate_against_bruteforce():
    # generous double loop over coordinates must agree exactly
    rng = random.Random(3)
    for _ in range(10):
        lo1, lo2 = rng.uniform(-6, 2), rng.uniform(-6, 2)
        hi1, hi2 = lo1 + rng.uniform(0, 8), lo2 + rng.uniform(0, 8)
        box = [(Fraction(lo1).limit_denominator(64), Fraction(hi1).limit_denominator(64)),
               (Fraction(lo2).limit_denominator(64), Fraction(hi2).limit_denominator(64))]
        got = {e.coords() for e in enumerate_in_box(K5.unit_ideal(), box)}
        brute = set()
        for a in range(-30, 31):
            for b in range(-30, 31):
                x = K5.element(a, b)
                if (x.compare_embedding(0, box[0][0]) >= 0
                        and x.compare_embedding(0, box[0][1]) <= 0
                        and x.compare_embedding(1, box[1][0]) >= 0
                        and x.compare_embedding(1, box[1][1]) <= 0):
                    brute.add((Fraction(a), Fraction(b)))
        assert got == brute


def test_enumerate_unit_action_bijective():
    u = K5.totally_positive_unit_gens()[0]
    box = [(Fraction(1), Fraction(10)), (Fraction(1), Fraction(10))]
    els = enumerate_in_box(K5.unit_ideal(), box, totally_positive=True)
    # u * box has exact rational corners since u acts by its embeddings only
    # on the exact comparisons; map elements and check membership instead
    mapped = [u * e for e in els]
    for m in mapped:
        # u*x lies in u*box by construction; verify via exact comparisons
        lo1 = box[0][0]
        assert (m * u.inverse()).compare_embedding(0, lo1) >= 0


def test_residue_system():
    rs = residue_system(Q.ideal(5))
    assert rs.phi == 4
    inv = {int(x.a): int(rs.inverse(x).a) for x in rs.units}
    assert inv == {1: 1, 2: 3, 3: 2, 4: 4}
    rs1 = residue_system(Q.unit_ideal())
    assert rs1.size == 1 and rs1.phi == 1
    rsk = residue_system(K5.ideal(2))
    assert rsk.size == 4 and rsk.phi == 3
    # inversion closed on units
    for x in rsk.units:
        assert rsk.inverse(x) in rsk.units
    assert residue_system(K5.ideal(3)).phi == arith_functions(K5.ideal(3))[1]


def test_psi():
    assert psi(Q.element(Fraction(1, 5))) == pytest.approx(cmath.exp(2j * cmath.pi / 5))
    assert psi(Q.element(17)) == pytest.approx(1.0)
    assert psi(K5.omega()) == pytest.approx(1.0)  # Tr omega = 1
    x = K5.element(Fraction(1, 3), Fraction(2, 7))
    assert abs(psi(x)) == pytest.approx(1.0)
    # additivity
    y = K5.element(Fraction(2, 5), Fraction(1, 2))
    assert psi(x + y) == pytest.approx(psi(x) * psi(y))


def test_ideal_count_growth():
    # #{m : Nm <= x} stays within [x/C, Cx]
    for K, C in ((Q, 2), (K5, 4), (K2, 4)):
        for x in (50, 200):
            n = len(ideals_of_norm_up_to(K, x))
            assert x / C <= n <= C * x


def test_tau_bound():
    for I in ideals_of_norm_up_to(K5, 60):
        if I.norm() > 1:
            _, _, tau = arith_functions(I)
            assert tau <= I.norm()


def test_principal_generator():
    for K in (K5, K2):
        for I in ideals_of_norm_up_to(K, 40):
            g = principal_generator(I)
            assert Ideal.principal(g) == I
    g11 = principal_generator(factor_ideal(K5.ideal(11))[0][0].ideal)
    assert abs(g11.norm()) == 11
