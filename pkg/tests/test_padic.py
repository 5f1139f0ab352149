import random

import pytest

from thetaforge.errors import BadPrime, NotOrdinary, NotSquare, PrecisionExhausted
from thetaforge.padic import (CycloElt, PadicInt, hensel_sqrt, hensel_unit_root,
                              inv_mod, kronecker)


def test_kronecker_small_table():
    assert kronecker(-7, 11) == 1
    assert kronecker(-7, 2) == 1
    assert kronecker(-11, 2) == -1
    assert kronecker(-7, 13) == -1
    assert kronecker(-4, 5) == 1
    assert kronecker(5, 5) == 0
    assert kronecker(2, 7) == 1
    assert kronecker(3, 7) == -1
    assert kronecker(-1, 3) == -1


def test_kronecker_matches_euler_criterion():
    rng = random.Random(11)
    for p in (3, 5, 7, 11, 13, 17, 19, 23):
        for _ in range(50):
            a = rng.randrange(-200, 200)
            if a % p == 0:
                assert kronecker(a, p) == 0
            else:
                euler = pow(a % p, (p - 1) // 2, p)
                assert kronecker(a, p) == (1 if euler == 1 else -1)


def test_kronecker_multiplicative_in_top():
    rng = random.Random(23)
    for _ in range(200):
        a, b = rng.randrange(-50, 50), rng.randrange(-50, 50)
        n = rng.choice([3, 5, 7, 9, 11, 15])
        assert kronecker(a * b, n) == kronecker(a, n) * kronecker(b, n)


def test_padicint_ring_ops():
    a = PadicInt(7, 11, 3)
    b = PadicInt(30, 11, 3)
    assert (a + b).val == 37
    assert (a * b).val == 210
    assert (a - b).val == (7 - 30) % 11 ** 3
    assert (-a).val == 11 ** 3 - 7
    assert (a ** 0).val == 1
    assert a * a.inverse() == 1
    assert PadicInt(121, 11, 3).valuation() == 2
    assert PadicInt(0, 11, 3).valuation() == 3
    assert PadicInt(242, 11, 3).unit_part().val == 2
    c = PadicInt(11 ** 2 * 5, 11, 4)
    assert c.exact_divide(2) == PadicInt(5, 11, 2)
    with pytest.raises(PrecisionExhausted):
        PadicInt(11, 11, 3).exact_divide(2)
    with pytest.raises(ValueError):
        a + PadicInt(1, 11, 2)
    with pytest.raises(ValueError):
        a + PadicInt(1, 13, 3)
    with pytest.raises(ZeroDivisionError):
        PadicInt(22, 11, 3).inverse()
    assert PadicInt(11 ** 3 - 1, 11, 3).lift_centered() == -1


def test_hensel_sqrt_spot_value():
    assert hensel_sqrt(2, 7, 3) == 108
    assert (108 * 108) % 7 ** 3 == 2


def test_hensel_sqrt_random():
    rng = random.Random(5)
    for p in (7, 11, 13, 101):
        for prec in (1, 2, 5):
            for _ in range(20):
                x = rng.randrange(1, p ** prec)
                if x % p == 0:
                    continue
                a = x * x % p ** prec
                r = hensel_sqrt(a, p, prec)
                assert r * r % p ** prec == a
                assert 1 <= r % p <= (p - 1) // 2


def test_hensel_sqrt_rejects():
    with pytest.raises(NotSquare):
        hensel_sqrt(3, 7, 2)
    with pytest.raises(NotSquare):
        hensel_sqrt(7, 7, 2)
    with pytest.raises(BadPrime):
        hensel_sqrt(1, 2, 2)


def test_hensel_unit_root_spot_values():
    assert hensel_unit_root(1, 5, 4, 1).val == 1
    assert hensel_unit_root(1, 5, 4, 2).val == 1  # 1 - 1 + 125 = 0 mod 25
    alpha = hensel_unit_root(32, 11, 4, 6)
    m = 11 ** 6
    assert (alpha.val ** 2 - 32 * alpha.val + 11 ** 3) % m == 0
    assert alpha.val % 11 == 32 % 11


def test_hensel_unit_root_random():
    rng = random.Random(7)
    for p, k in ((11, 4), (13, 6), (7, 4)):
        for _ in range(25):
            a_p = rng.randrange(-3 * p ** 2, 3 * p ** 2)
            if a_p % p == 0:
                with pytest.raises(NotOrdinary):
                    hensel_unit_root(a_p, p, k, 4)
                continue
            alpha = hensel_unit_root(a_p, p, k, 5)
            m = p ** 5
            assert (alpha.val * alpha.val - a_p * alpha.val + p ** (k - 1)) % m == 0
            assert alpha.is_unit()
            assert alpha.val % p == a_p % p


def test_cyclo_root_of_unity_relations():
    p, n, prec = 5, 2, 3
    z = CycloElt.zeta_power(1, p, n, prec)
    acc = CycloElt.one(p, n, prec)
    for _ in range(p ** n):
        acc = acc * z
    assert acc == CycloElt.one(p, n, prec)
    # minimal relation: sum of zeta^(i p^(n-1)) over i < p vanishes
    s = CycloElt.zero(p, n, prec)
    for i in range(p):
        s = s + CycloElt.zeta_power(i * p ** (n - 1), p, n, prec)
    assert s.is_zero()


def test_cyclo_multiplication_matches_exponent_addition():
    rng = random.Random(3)
    p, n, prec = 11, 1, 4
    for _ in range(100):
        e1, e2 = rng.randrange(0, p), rng.randrange(0, p)
        lhs = CycloElt.zeta_power(e1, p, n, prec) * CycloElt.zeta_power(e2, p, n, prec)
        assert lhs == CycloElt.zeta_power(e1 + e2, p, n, prec)


def test_cyclo_galois_is_ring_automorphism():
    rng = random.Random(17)
    p, n, prec = 3, 3, 2
    deg = CycloElt.degree(p, n)
    for _ in range(30):
        a = CycloElt([rng.randrange(0, 9) for _ in range(deg)], p, n, prec)
        b = CycloElt([rng.randrange(0, 9) for _ in range(deg)], p, n, prec)
        s = rng.choice([x for x in range(1, p ** n) if x % p])
        assert (a * b).galois(s) == a.galois(s) * b.galois(s)
        assert (a + b).galois(s) == a.galois(s) + b.galois(s)
        t = rng.choice([x for x in range(1, p ** n) if x % p])
        assert a.galois(s).galois(t) == a.galois(s * t)


def test_cyclo_layer_zero_is_scalar():
    one = CycloElt.one(7, 0, 2)
    z = CycloElt.zeta_power(5, 7, 0, 2)
    assert z == one
    assert inv_mod(3, 49) * 3 % 49 == 1
