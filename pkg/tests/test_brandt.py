import itertools
from functools import lru_cache

import pytest

from thetaforge.brandt import (BrandtModule, eigenvalue_candidates,
                               extract_eigenvalue, hensel_eigenpair,
                               stabilization_maps, stabilize, up_matrix)
from thetaforge.errors import BadPrime, NonInvertibleWeight
from thetaforge.padic import hensel_unit_root
from thetaforge.quatalg import (choose_algebra, eichler_order, maximal_order,
                                right_ideal_classes)
from thetaforge.tracecheck import dim_cusp_forms, trace_hecke


@lru_cache(maxsize=None)
def class_set(D, M=1, avoid=1):
    order = maximal_order(choose_algebra(D))
    if M > 1:
        order = eichler_order(order, M)
    return right_ideal_classes(order, D, M, avoid=avoid)


@lru_cache(maxsize=None)
def module(D, k, p, prec, M=1):
    return BrandtModule(class_set(D, M, avoid=p if M == 1 else 1), k, p, prec)


def rect_mul(A, B, m):
    return [[sum(A[i][t] * B[t][j] for t in range(len(B))) % m
             for j in range(len(B[0]))] for i in range(len(A))]


def centered(x, m):
    return x if x <= m // 2 else x - m


def apply_mat(A, v, m):
    return [sum(A[i][j] * v[j] for j in range(len(v))) % m for i in range(len(A))]


def test_weight2_row_sums():
    # degree count: each class has q+1 neighbors, trivial coefficients
    for D in (2, 5, 11):
        bm = module(D, 2, 11, 2)
        for q in (2, 3, 7):
            if D % q == 0:
                continue
            T = bm.hecke_matrix(q)
            assert all(sum(row) % bm.mod == q + 1 for row in T)


def test_level5_weight4_eigenvalues_match_trace_oracle():
    bm = module(5, 4, 11, 4)
    basis = bm.invariant_basis()
    assert len(basis) == 1
    phi = basis[0]
    for q in (2, 3, 7, 11, 13):
        lam = centered(extract_eigenvalue(bm.hecke_matrix(q), phi, 11, 4), bm.mod)
        assert lam % bm.mod == trace_hecke(q, 4, 5) % bm.mod
        assert lam * lam <= 4 * q ** 3  # Ramanujan window pins the lift
    lam5 = centered(extract_eigenvalue(bm.atkin_lehner(5), phi, 11, 4), bm.mod)
    assert lam5 == -5


def test_selfadjoint_and_commuting_level5():
    bm = module(5, 4, 11, 4)
    mod = bm.mod
    Pi = bm.projector()
    G = bm.petersson_gram()
    ops = {q: bm.hecke_matrix(q) for q in (2, 3, 7, 13)}
    for q, T in ops.items():
        Tt = [list(col) for col in zip(*T)]
        lhs = rect_mul(rect_mul(rect_mul([list(c) for c in zip(*Pi)], Tt, mod), G, mod), Pi, mod)
        rhs = rect_mul(rect_mul(rect_mul([list(c) for c in zip(*Pi)], G, mod), T, mod), Pi, mod)
        assert lhs == rhs
    for q1, q2 in itertools.combinations(ops, 2):
        a = rect_mul(ops[q1], rect_mul(ops[q2], Pi, mod), mod)
        b = rect_mul(ops[q2], rect_mul(ops[q1], Pi, mod), mod)
        assert a == b


def test_selfadjoint_and_commuting_level11_ramified():
    # 11 ramifies in the algebra, so this runs the rational weight-4 model
    bm = module(11, 4, 11, 4)
    mod = bm.mod
    basis = bm.invariant_basis()
    assert len(basis) == 2 == dim_cusp_forms(4, 11)
    B = [[col[a] for col in basis] for a in range(bm.dim)]
    G = bm.petersson_gram()
    Bt = [list(col) for col in zip(*B)]
    Gr = rect_mul(rect_mul(Bt, G, mod), B, mod)
    assert Gr == [list(col) for col in zip(*Gr)]
    restricted = {}
    for q in (2, 3, 5, 7, 13):
        A = bm.restrict(bm.hecke_matrix(q), basis)
        restricted[q] = A
        assert (A[0][0] + A[1][1]) % mod == trace_hecke(q, 4, 11) % mod
        At = [list(col) for col in zip(*A)]
        assert rect_mul(At, Gr, mod) == rect_mul(Gr, A, mod)
    for q1, q2 in itertools.combinations(restricted, 2):
        assert (rect_mul(restricted[q1], restricted[q2], mod)
                == rect_mul(restricted[q2], restricted[q1], mod))


def test_hensel_eigenpair_splits_level11():
    bm = module(11, 4, 11, 4)
    mod = bm.mod
    A = bm.restrict(bm.hecke_matrix(2), bm.invariant_basis())
    cands = eigenvalue_candidates(A, 11)
    assert cands == [6, 7]  # a_2 = 1 +- sqrt(3), and 3 = 5^2 mod 11
    lams = []
    for c in cands:
        vec, lam = hensel_eigenpair(A, c, 11, 4)
        assert apply_mat(A, vec, mod) == [lam * x % mod for x in vec]
        assert extract_eigenvalue(A, vec, 11, 4) == lam
        lams.append(lam)
    assert sum(lams) % mod == trace_hecke(2, 4, 11) % mod
    det = (A[0][0] * A[1][1] - A[0][1] * A[1][0]) % mod
    assert lams[0] * lams[1] % mod == det


def test_invariant_dimension_bookkeeping():
    assert len(module(5, 4, 11, 2).invariant_basis()) == dim_cusp_forms(4, 5)
    assert len(module(2, 8, 11, 2).invariant_basis()) == dim_cusp_forms(8, 2)
    assert len(module(3, 6, 17, 2).invariant_basis()) == dim_cusp_forms(6, 3)


def test_invariant_dimension_with_level():
    # D = 5, M = 11: two oldform copies of level 5 plus the new space at 55
    bm = module(5, 4, 11, 2, M=11)
    new55 = dim_cusp_forms(4, 55) - 2 * dim_cusp_forms(4, 5) - 2 * dim_cusp_forms(4, 11)
    want = new55 + 2 * dim_cusp_forms(4, 5)
    assert len(bm.invariant_basis()) == want == 12


def test_stabilization_identities():
    p, prec = 11, 4
    bm = module(5, 4, p, prec)
    mod = bm.mod
    cs_p = class_set(5, M=p)
    bm_p = BrandtModule(cs_p, 4, p, prec, splitting=bm.splitting)
    i1, i2s = stabilization_maps(bm_p, bm)
    U = up_matrix(bm_p)
    Tp = bm.hecke_matrix(p)
    Pi = bm.projector()
    # degeneracy maps intertwine U_p with T_p on unit-invariant vectors
    i1P = rect_mul(i1, Pi, mod)
    i2P = rect_mul(i2s, Pi, mod)
    lhs = rect_mul(U, i1P, mod)
    rhs = [[(x - y) % mod for x, y in zip(r1, r2)]
           for r1, r2 in zip(rect_mul(rect_mul(i1, Tp, mod), Pi, mod), i2P)]
    assert lhs == rhs
    assert rect_mul(U, i2P, mod) == [[x * p ** 3 % mod for x in row] for row in i1P]


def test_stabilized_eigenform():
    p, prec = 11, 4
    bm = module(5, 4, p, prec)
    mod = bm.mod
    bm_p = BrandtModule(class_set(5, M=p), 4, p, prec, splitting=bm.splitting)
    phi = bm.invariant_basis()[0]
    a_p = extract_eigenvalue(bm.hecke_matrix(p), phi, p, prec)
    assert centered(a_p, mod) == 32
    alpha = hensel_unit_root(32, p, 4, prec).val
    assert (alpha * alpha - 32 * alpha + p ** 3) % mod == 0
    assert alpha % p == 10
    sharp = stabilize(bm_p, bm, phi, alpha)
    U = up_matrix(bm_p)
    assert apply_mat(U, sharp, mod) == [alpha * x % mod for x in sharp]
    assert extract_eigenvalue(U, sharp, p, prec) == alpha
    # prime-to-p eigenvalues survive the stabilization
    assert centered(extract_eigenvalue(bm_p.hecke_matrix(2), sharp, p, prec), mod) == -4
    assert centered(extract_eigenvalue(bm_p.hecke_matrix(3), sharp, p, prec), mod) == 2


def test_stabilization_weight8():
    p, prec = 11, 3
    bm = module(2, 8, p, prec)
    mod = bm.mod
    bm_p = BrandtModule(class_set(2, M=p), 8, p, prec, splitting=bm.splitting)
    i1, i2s = stabilization_maps(bm_p, bm)
    U = up_matrix(bm_p)
    Pi = bm.projector()
    i1P = rect_mul(i1, Pi, mod)
    i2P = rect_mul(i2s, Pi, mod)
    lhs = rect_mul(U, i1P, mod)
    rhs = [[(x - y) % mod for x, y in zip(r1, r2)]
           for r1, r2 in zip(rect_mul(rect_mul(i1, bm.hecke_matrix(p), mod), Pi, mod), i2P)]
    assert lhs == rhs
    assert rect_mul(U, i2P, mod) == [[x * p ** 7 % mod for x in row] for row in i1P]
    phi = bm.invariant_basis()[0]
    a_p = extract_eigenvalue(bm.hecke_matrix(p), phi, p, prec)
    assert a_p == 1092 % mod == trace_hecke(11, 8, 2) % mod
    alpha = hensel_unit_root(1092, p, 8, prec).val
    sharp = stabilize(bm_p, bm, phi, alpha)
    assert extract_eigenvalue(U, sharp, p, prec) == alpha
    lam3 = extract_eigenvalue(bm_p.hecke_matrix(3), sharp, p, prec)
    assert lam3 == 12 % mod == trace_hecke(3, 8, 2) % mod


def test_model_guards():
    with pytest.raises(BadPrime):
        BrandtModule(class_set(11), 6, 11, 2)  # ramified p only has the k=4 model
    with pytest.raises(BadPrime):
        BrandtModule(class_set(5), 6, 3, 2)  # p must exceed k - 2
    bm = module(5, 4, 11, 2)
    with pytest.raises(ValueError):
        bm.hecke_matrix(5)
    with pytest.raises(ValueError):
        bm.atkin_lehner(3)
    with pytest.raises(NonInvertibleWeight):
        BrandtModule(class_set(5, avoid=3), 4, 3, 2).projector()
