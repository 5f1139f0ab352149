import random
from fractions import Fraction

import pytest

from thetaforge.errors import NotDefinite
from thetaforge.quatalg import (LocalSplitting, QLattice, QuaternionAlgebra,
                                choose_algebra, eichler_mass, eichler_order,
                                hilbert_symbol, ideal_norm, left_order,
                                maximal_order, qneighbors, radical_ideal,
                                ramified_primes, reduced_discriminant,
                                right_ideal_classes, transporter, unit_group)


def test_hilbert_symbol_spot_values():
    assert hilbert_symbol(-1, -1, 2) == -1
    assert hilbert_symbol(-1, -1, 3) == 1
    assert hilbert_symbol(-1, -1, "inf") == -1
    assert hilbert_symbol(-2, -5, 5) == -1
    assert hilbert_symbol(-2, -5, 2) == 1
    assert hilbert_symbol(-1, -11, 11) == -1
    assert hilbert_symbol(-2, -13, 13) == -1
    assert hilbert_symbol(2, 3, 5) == 1


def test_hilbert_product_formula():
    rng = random.Random(11)
    from thetaforge.padic import prime_factors
    for _ in range(40):
        a = rng.choice([x for x in range(-30, 31) if x])
        b = rng.choice([x for x in range(-30, 31) if x])
        places = set(prime_factors(2 * a * b)) | {2}
        prod = hilbert_symbol(a, b, "inf")
        for q in places:
            prod *= hilbert_symbol(a, b, q)
        assert prod == 1


def test_ramified_primes():
    assert ramified_primes(-1, -1) == [2]
    assert ramified_primes(-2, -5) == [5]
    assert ramified_primes(-1, -11) == [11]
    assert ramified_primes(-2, -13) == [13]


def test_choose_algebra():
    for D in (2, 3, 5, 7, 11, 13):
        alg = choose_algebra(D)
        assert alg.disc() == D
    with pytest.raises(NotDefinite):
        choose_algebra(15)  # two prime factors: indefinite


def test_quaternion_arithmetic():
    rng = random.Random(7)
    alg = QuaternionAlgebra(-2, -5)
    for _ in range(50):
        x = tuple(rng.randrange(-5, 6) for _ in range(4))
        y = tuple(rng.randrange(-5, 6) for _ in range(4))
        z = tuple(rng.randrange(-5, 6) for _ in range(4))
        assert alg.mult(alg.mult(x, y), z) == alg.mult(x, alg.mult(y, z))
        assert alg.conj(alg.mult(x, y)) == alg.mult(alg.conj(y), alg.conj(x))
        assert alg.nrd(alg.mult(x, y)) == alg.nrd(x) * alg.nrd(y)
        assert alg.trd(alg.mult(x, y)) == alg.trd(alg.mult(y, x))
        # x^2 - trd(x) x + nrd(x) = 0
        sq = alg.mult(x, x)
        t, n = alg.trd(x), alg.nrd(x)
        assert sq == (t * x[0] - n, t * x[1], t * x[2], t * x[3])


def test_maximal_orders():
    for D in (2, 3, 5, 7, 11, 13):
        alg = choose_algebra(D)
        O = maximal_order(alg)
        assert reduced_discriminant(O) == D
        assert O.is_order()
        assert O.contains((1, 0, 0, 0))


def test_unit_group_orders():
    # |O^x| for the unique class: D=2 Hurwitz-like 24, D=3: 12, D=5: 6
    for D, nunits in ((2, 24), (3, 12), (5, 6), (13, 2)):
        alg = choose_algebra(D)
        O = maximal_order(alg)
        units = unit_group(O)
        assert len(units) == nunits
        for u in units:
            assert alg.nrd(u) == 1
            assert O.contains(u)


def test_class_numbers_and_mass():
    expected_h = {2: 1, 3: 1, 5: 1, 7: 1, 11: 2, 13: 1}
    for D, h in expected_h.items():
        alg = choose_algebra(D)
        O = maximal_order(alg)
        cs = right_ideal_classes(O, D, 1)
        assert len(cs) == h, D
        assert cs.mass == eichler_mass(D, 1)
        total = sum(Fraction(2, len(u)) for u in cs.units)
        assert total == cs.mass
    # D=11: the two classes have automorphism orders 4 and 6
    alg = choose_algebra(11)
    cs = right_ideal_classes(maximal_order(alg), 11, 1)
    assert sorted(len(u) for u in cs.units) == [4, 6]


def test_eichler_order_and_classes():
    alg = choose_algebra(5)
    O = maximal_order(alg)
    R = eichler_order(O, 11)
    assert reduced_discriminant(R) == 55
    assert R.is_order()
    assert O.index_over(R) == 11  # one mod-11 linear condition
    cs = right_ideal_classes(R, 5, 11, avoid=11)
    assert cs.mass == eichler_mass(5, 11) == 4
    assert sum(Fraction(2, len(u)) for u in cs.units) == 4
    for I, n in zip(cs.ideals, cs.nrds):
        assert ideal_norm(R, I) == n
        assert n.numerator % 11 != 0 and n.numerator % 5 != 0


def test_local_splitting_certifies_and_acts():
    rng = random.Random(3)
    for D, p, prec in ((5, 11, 4), (2, 7, 3), (11, 3, 2)):
        alg = choose_algebra(D)
        O = maximal_order(alg)
        sp = LocalSplitting(O, p, prec)  # internal certification asserts
        mod = p ** prec
        bas = O.basis()
        for _ in range(20):
            cx = [rng.randrange(-4, 5) for _ in range(4)]
            cy = [rng.randrange(-4, 5) for _ in range(4)]
            x = tuple(sum(cx[t] * bas[t][c] for t in range(4))
                      for c in range(4))
            y = tuple(sum(cy[t] * bas[t][c] for t in range(4))
                      for c in range(4))
            Mx, My = sp.matrix_of(x), sp.matrix_of(y)
            Mxy = sp.matrix_of(alg.mult(x, y))
            prod = [[(Mx[0][0] * My[0][0] + Mx[0][1] * My[1][0]) % mod,
                     (Mx[0][0] * My[0][1] + Mx[0][1] * My[1][1]) % mod],
                    [(Mx[1][0] * My[0][0] + Mx[1][1] * My[1][0]) % mod,
                     (Mx[1][0] * My[0][1] + Mx[1][1] * My[1][1]) % mod]]
            assert prod == Mxy
            assert (Mx[0][0] + Mx[1][1]) % mod == alg.trd(x) % mod
            assert (Mx[0][0] * Mx[1][1] - Mx[0][1] * Mx[1][0]) % mod \
                == alg.nrd(x) % mod


def test_radical_ideal():
    for D in (2, 5, 11):
        alg = choose_algebra(D)
        O = maximal_order(alg)
        P = radical_ideal(O, D)
        assert ideal_norm(O, P) == D
        # P^2 = D * O
        assert P.multiply(P) == O.scale(D)


def test_qneighbors():
    alg = choose_algebra(5)
    O = maximal_order(alg)
    sp = LocalSplitting(O, 3, 1)
    nbrs = qneighbors(O, sp, O, Fraction(1))
    assert len(nbrs) == 4
    seen = set()
    for J, n in nbrs:
        assert n == 3
        assert ideal_norm(O, J) == 3
        assert O.index_over(J) == 9
        # genuinely a right O-module
        assert J.multiply(O) == J
        seen.add(J)
    assert len(seen) == 4


def test_transporter_identifies_principal_ideals():
    alg = choose_algebra(5)
    O = maximal_order(alg)
    # x * O is in the class of O for any x
    x = (1, 1, 0, 0)  # nrd = 1 + 2 = 3
    xO = QLattice(alg, [list(alg.mult(x, tuple(r))) for r in O.mat], O.den)
    n = ideal_norm(O, xO)
    assert n == alg.nrd(x) == 3
    g = transporter(xO, O, n, Fraction(1))
    assert g is not None
    gO = QLattice(alg, [list(alg.mult(g, tuple(r))) for r in O.mat], O.den)
    assert gO == xO


def test_left_order_is_order():
    alg = choose_algebra(11)
    O = maximal_order(alg)
    cs = right_ideal_classes(O, 11, 1)
    for I, n in zip(cs.ideals, cs.nrds):
        lo = left_order(I, n)
        assert lo.is_order()
        assert reduced_discriminant(lo) == 11
        # I is a left ideal of its left order
        for b in lo.basis():
            for x in I.basis():
                assert I.contains(alg.mult(b, x))
