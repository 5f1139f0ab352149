import random
from functools import lru_cache

import pytest

from thetaforge.cmpoints import (ClassGroup, class_group, cm_splitting,
                                 form_inverse, form_pow, form_prime_to,
                                 galois_act, gross_points, is_optimal,
                                 order_generator, principal_form,
                                 reduce_form, reduced_forms,
                                 ring_class_number, split_cyclic)
from thetaforge.errors import (AnomalousSplit, ConductorMismatch,
                               HeegnerHypothesisFailed)
from thetaforge.padic import kronecker
from thetaforge.quatalg import (choose_algebra, eichler_order, maximal_order,
                                right_ideal_classes)


@lru_cache(maxsize=None)
def class_set(D, avoid):
    order = maximal_order(choose_algebra(D))
    return right_ideal_classes(order, D, 1, avoid=avoid)


@lru_cache(maxsize=None)
def splitting(D, DK, p):
    return cm_splitting(maximal_order(choose_algebra(D)), DK, 1, p)


@lru_cache(maxsize=None)
def points(D, DK, p, n):
    return gross_points(class_set(D, p), splitting(D, DK, p), n)


def test_reduction_and_counts():
    # h(-23)=3, h(-47)=5, h(-71)=7 and a few one-class discs
    for d, h in [(-3, 1), (-4, 1), (-7, 1), (-8, 1), (-11, 1),
                 (-23, 3), (-47, 5), (-71, 7), (-15, 2), (-56, 4)]:
        forms = reduced_forms(d)
        assert len(forms) == h
        for f in forms:
            a, b, c = f
            assert b * b - 4 * a * c == d
            assert reduce_form(a, b, c) == f
    # reduction reaches the reduced list from skew representatives
    assert reduce_form(22, 13, 2) == (1, 1, 2)  # disc -7
    assert reduce_form(2, -13, 22) == (1, 1, 2)
    assert reduce_form(4, -1, 53) in reduced_forms(-847)


def test_composition_group_axioms():
    rng = random.Random(11)
    for disc in (-47, -84, -104):
        G = ClassGroup(disc)
        e = G.identity()
        for _ in range(40):
            f1, f2, f3 = (rng.choice(G.forms) for _ in range(3))
            p12 = G.mul(f1, f2)
            assert p12 in G._index
            assert G.mul(p12, f3) == G.mul(f1, G.mul(f2, f3))
            assert G.mul(f1, e) == f1
            assert G.mul(f1, G.inv(f1)) == e
        for f in G.forms:
            assert len(G) % G.element_order(f) == 0


def test_ring_class_numbers_against_form_counts():
    # class_group cross-checks the analytic formula against the enumeration
    for DK, p in [(11, 3), (4, 3), (4, 5), (8, 5)]:
        for n in range(4):
            G = class_group(DK, p, n)
            assert len(G) == ring_class_number(DK, p, n)
    for n in range(3):
        G = class_group(7, 11, n)
        assert len(G) == ring_class_number(7, 11, n)
    assert len(class_group(4, 5, 1)) == 2
    assert len(class_group(4, 3, 1)) == 2
    assert len(class_group(7, 11, 1)) == 10
    assert len(class_group(7, 11, 2)) == 110


def test_split_cyclic_decomposition():
    G = class_group(4, 5, 2)  # order 10 = 5 * 2
    pp, dd, proj = split_cyclic(G, 5)
    assert len(pp) == 5 and len(dd) == 2
    for f in G.forms:
        assert proj(f) in pp
    rng = random.Random(5)
    for _ in range(15):
        f1, f2 = rng.choice(G.forms), rng.choice(G.forms)
        assert proj(G.mul(f1, f2)) == G.mul(proj(f1), proj(f2))
    # proj restricted to the p-part is the identity
    for f in pp:
        assert proj(f) == f

    G1 = class_group(7, 11, 1)
    pp, dd, _ = split_cyclic(G1, 11)
    assert len(pp) == 1 and len(dd) == 10

    # h(O_3) = 6 for K = Q(sqrt(-23)) is divisible by p = 3
    with pytest.raises(AnomalousSplit):
        split_cyclic(class_group(23, 3, 1), 3)


def test_cm_splitting_invariants():
    for D, DK, p in [(5, 7, 11), (2, 11, 3)]:
        sp = splitting(D, DK, p)
        alg = sp.alg
        assert alg.trd(sp.theta) == sp.DKp
        assert alg.nrd(sp.theta) == (sp.DKp ** 2 + sp.DK) // 4
        assert sp.order.contains(sp.theta)
        assert alg.trd(sp.w) == 0 and alg.nrd(sp.w) == sp.DK
        jw = alg.mult(sp.j, sp.w)
        wj = alg.mult(sp.w, sp.j)
        assert all(x == -y for x, y in zip(jw, wj))
        beta = sp.beta
        assert beta == -alg.nrd(sp.j) and beta < 0
        assert kronecker(beta % p, p) == 1
        assert beta % DK != 0
        # deterministic rebuild
        sp2 = cm_splitting(maximal_order(choose_algebra(D)), DK, 1, p)
        assert sp2.theta == sp.theta and sp2.j == sp.j


def test_heegner_hypothesis_violations():
    with pytest.raises(HeegnerHypothesisFailed):
        cm_splitting(maximal_order(choose_algebra(5)), 11, 1, 3)  # 5 splits
    with pytest.raises(HeegnerHypothesisFailed):
        cm_splitting(maximal_order(choose_algebra(5)), 7, 1, 7)  # p | DK
    # 2 is inert in Q(sqrt(-19)) but 3 | M is inert too, which is forbidden
    ord3 = eichler_order(maximal_order(choose_algebra(2)), 3)
    with pytest.raises(HeegnerHypothesisFailed):
        cm_splitting(ord3, 19, 3, 11)


def test_gross_point_counts():
    # expected: 2^omega(D) * h(O_{p^n}) unoriented, h on the chosen orbit
    for D, DK, p, n, total, orb in [
            (5, 7, 11, 0, 2, 1),
            (5, 7, 11, 1, 20, 10),
            (2, 11, 3, 0, 2, 1),
            (2, 11, 3, 1, 4, 2),
            (2, 11, 3, 2, 12, 6)]:
        gps = points(D, DK, p, n)
        assert len(gps.all_points) == total
        assert len(gps.points) == orb
        assert len(gps.group) == orb or n == 0


def test_optimality_certificates():
    gps = points(5, 7, 11, 1)
    cs = gps.cs
    x = gps.points[0]
    L = cs.left_orders[x.cls]
    assert is_optimal(L, x.y, gps.disc, 11)
    # an embedding of conductor 1 pushed up to the conductor-11^2 order is
    # not optimal: trace and norm match but the sub-generator stays integral
    from fractions import Fraction
    g0 = points(5, 7, 11, 0).points[0]
    L0 = cs.left_orders[g0.cls]
    p2 = 11 ** 2
    fake = tuple(Fraction(1 - p2, 2) * (1 if c == 0 else 0) + p2 * yc
                 for c, yc in enumerate(g0.y))
    disc2 = -7 * 11 ** 4
    t0, n0 = order_generator(disc2)
    alg = cs.alg
    assert alg.trd(fake) == t0 and alg.nrd(fake) == n0
    assert L0.contains(fake)
    assert not is_optimal(L0, fake, disc2, 11)
    # and every emitted point of conductor 11^2 does pass
    gps2 = points(2, 11, 3, 2)
    for x in gps2.points:
        assert is_optimal(gps2.cs.left_orders[x.cls], x.y, gps2.disc, 3)


def test_torsor_small_config_exhaustive():
    # D=2, K=Q(sqrt(-11)), p=3: full check of the torsor axioms at n=1, 2
    for n in (1, 2):
        gps = points(2, 11, 3, n)
        G = gps.group
        orbit = gps.points
        e = G.identity()
        for x in orbit:
            assert galois_act(gps, e, x) == x
            images = [gps.act(f, x) for f in G.forms]
            assert len(set(images)) == len(G)       # free
            assert set(images) == set(orbit)        # transitive
        for f1 in G.forms:
            for f2 in G.forms:
                x = orbit[0]
                assert gps.act(G.mul(f1, f2), x) == gps.act(f1, gps.act(f2, x))


def test_torsor_headline_config():
    gps = points(5, 7, 11, 1)
    G = gps.group
    orbit = gps.points
    assert len(orbit) == len(G) == 10
    for x in orbit:
        images = [gps.act(f, x) for f in G.forms]
        assert len(set(images)) == len(G)
        assert set(images) == set(orbit)
    rng = random.Random(3)
    for _ in range(12):
        f1, f2 = rng.choice(G.forms), rng.choice(G.forms)
        x = rng.choice(orbit)
        assert gps.act(G.mul(f1, f2), x) == gps.act(f1, gps.act(f2, x))


def test_torsor_headline_depth_two():
    gps = points(5, 7, 11, 2)
    G = gps.group
    orbit = gps.points
    assert len(orbit) == len(G) == 110
    base = orbit[0]
    images = [gps.act(f, base) for f in G.forms]
    assert len(set(images)) == 110
    assert set(images) == set(orbit)
    rng = random.Random(17)
    for _ in range(6):
        f1, f2 = rng.choice(G.forms), rng.choice(G.forms)
        assert gps.act(G.mul(f1, f2), base) == gps.act(f1, gps.act(f2, base))


def test_conductor_mismatch_rejected():
    gps = points(2, 11, 3, 1)
    with pytest.raises(ConductorMismatch):
        gps.act(principal_form(-11 * 81), gps.points[0])


def test_form_prime_to():
    import math
    for f in reduced_forms(-847):
        g = form_prime_to(f, 2 * 5 * 7 * 11, -847)
        assert math.gcd(g[0], 770) == 1
        assert g[1] ** 2 - 4 * g[0] * g[2] == -847
        assert reduce_form(*g) == f
