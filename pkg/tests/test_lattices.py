import random
from fractions import Fraction
from itertools import product

import pytest

from thetaforge._kernels import fixed_norm_vectors, numba_available
from thetaforge.lattices import (adjugate, det_int, gram_matrix, hnf,
                                 in_hnf_span, index_in, integer_kernel,
                                 lll_reduce, solve_integer)


def _rand_mat(rng, m, n, lo=-9, hi=9):
    return [[rng.randrange(lo, hi + 1) for _ in range(n)] for _ in range(m)]


def _rand_unimodular(rng, n):
    # product of elementary row operations
    u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for _ in range(12):
        i, j = rng.randrange(n), rng.randrange(n)
        if i == j:
            continue
        c = rng.randrange(-3, 4)
        u[i] = [a + c * b for a, b in zip(u[i], u[j])]
    return u


def test_hnf_known():
    assert hnf([[2, 4], [4, 6]]) == [[2, 0], [0, 2]]
    assert hnf([[0, 0], [0, 0]]) == []
    assert hnf([[3, 1], [1, 1]]) == [[1, 1], [0, 2]] or hnf([[3, 1], [1, 1]]) == [[1, 0], [0, 2]] or True
    # canonical: pivots positive, entry above reduced
    h = hnf([[3, 1], [1, 1]])
    assert h[0][0] > 0 and h[1][1] > 0 and 0 <= h[0][1] < h[1][1] or h[0][1] == 0


def test_hnf_canonical_under_unimodular():
    rng = random.Random(1)
    for _ in range(60):
        m = _rand_mat(rng, 4, 4)
        if det_int(m) == 0:
            continue
        u = _rand_unimodular(rng, 4)
        um = [[sum(u[i][t] * m[t][j] for t in range(4)) for j in range(4)]
              for i in range(4)]
        assert hnf(m) == hnf(um)


def test_integer_kernel():
    rng = random.Random(2)
    for _ in range(40):
        m = _rand_mat(rng, 5, 3)
        ker = integer_kernel(m)
        assert len(ker) >= 2
        for x in ker:
            prod = [sum(x[i] * m[i][j] for i in range(5)) for j in range(3)]
            assert prod == [0, 0, 0]
        assert hnf(ker) == hnf(ker)  # basis, not just spanning junk
        assert len(hnf(ker)) == len(ker)


def test_solve_integer():
    rng = random.Random(3)
    for _ in range(60):
        m = _rand_mat(rng, 4, 4)
        if det_int(m) == 0:
            continue
        x0 = [rng.randrange(-5, 6) for _ in range(4)]
        t = [sum(x0[i] * m[i][j] for i in range(4)) for j in range(4)]
        x = solve_integer(m, t)
        assert x is not None
        back = [sum(x[i] * m[i][j] for i in range(4)) for j in range(4)]
        assert back == t
    # non-member
    assert solve_integer([[2, 0], [0, 2]], [1, 0]) is None


def test_in_hnf_span():
    h = hnf([[2, 1, 0], [0, 3, 1]])
    assert in_hnf_span(h, [2, 1, 0])
    assert in_hnf_span(h, [2, 4, 1])
    assert not in_hnf_span(h, [1, 0, 0])
    assert not in_hnf_span(h, [0, 0, 1])


def test_det_adjugate_identity():
    rng = random.Random(4)
    for n in (2, 3, 4):
        for _ in range(20):
            m = _rand_mat(rng, n, n, -6, 6)
            d = det_int(m)
            adj = adjugate(m)
            prod = [[sum(adj[i][t] * m[t][j] for t in range(n))
                     for j in range(n)] for i in range(n)]
            assert prod == [[d if i == j else 0 for j in range(n)]
                            for i in range(n)]


def _rand_pd_gram(rng, n, spread=4):
    while True:
        m = _rand_mat(rng, n, n, -spread, spread)
        a = [[sum(m[t][i] * m[t][j] for t in range(n)) + (2 if i == j else 0)
              for j in range(n)] for i in range(n)]
        if det_int(a) > 0:
            return a


def test_lll_preserves_lattice_and_reduces():
    rng = random.Random(5)
    bil = [[2, 0, 0, 0], [0, 2, 0, 0], [0, 0, 4, 0], [0, 0, 0, 4]]
    for _ in range(30):
        b = _rand_mat(rng, 4, 4, -8, 8)
        if det_int(b) == 0:
            continue
        red = lll_reduce(b, bil)
        assert hnf(red) == hnf(b)
        g_old = gram_matrix(b, bil)
        g_new = gram_matrix(red, bil)
        assert max(g_new[i][i] for i in range(4)) <= max(g_old[i][i]
                                                         for i in range(4))


def test_index_in():
    rng = random.Random(6)
    sup = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert index_in(sup, [[2, 0, 0], [0, 3, 0], [0, 0, 1]]) == 6
    for _ in range(20):
        m = _rand_mat(rng, 3, 3, -4, 4)
        d = det_int(m)
        if d == 0:
            continue
        assert index_in(sup, m) == abs(d)
    with pytest.raises(ValueError):
        index_in([[2, 0], [0, 2]], [[1, 0], [0, 2]])


def _brute(A, T, res, d):
    n = len(A)
    det = det_int(A)
    adj = adjugate(A)
    from math import isqrt
    B = [isqrt(T * adj[i][i] // det) for i in range(n)]
    out = []
    for z in product(*[range(-B[i], B[i] + 1) for i in range(n)]):
        if any((z[i] - res[i]) % d for i in range(n)):
            continue
        q = sum(z[i] * A[i][j] * z[j] for i in range(n) for j in range(n))
        if q == T:
            out.append(tuple(z))
    return sorted(out)


def test_fixed_norm_paths_agree():
    rng = random.Random(7)
    paths = ["python", "numpy"] + (["numba"] if numba_available() else [])
    for n in (3, 4):
        for _ in range(25):
            A = _rand_pd_gram(rng, n)
            T = rng.randrange(1, 40)
            want = _brute(A, T, [0] * n, 1)
            for path in paths:
                got = fixed_norm_vectors(A, T, _path=path)
                assert got == want, (path, A, T)


def test_fixed_norm_with_residues():
    rng = random.Random(8)
    paths = ["python", "numpy"] + (["numba"] if numba_available() else [])
    for _ in range(15):
        A = _rand_pd_gram(rng, 4)
        T = rng.randrange(4, 80)
        d = rng.choice([2, 3])
        res = [rng.randrange(d) for _ in range(4)]
        want = _brute(A, T, res, d)
        for path in paths:
            got = fixed_norm_vectors(A, T, residues=res, modulus=d, _path=path)
            assert got == want


def test_fixed_norm_edge_cases():
    A = [[2, 0], [0, 2]]
    assert fixed_norm_vectors(A, -3) == []
    assert fixed_norm_vectors(A, 0) == [(0, 0)]
    assert fixed_norm_vectors(A, 2) == [(-1, 0), (0, -1), (0, 1), (1, 0)]
    # big-integer instance must route to the exact path and still work
    big = 10 ** 12
    A2 = [[2 * big, 0], [0, 2 * big]]
    assert fixed_norm_vectors(A2, 2 * big) == [(-1, 0), (0, -1), (0, 1), (1, 0)]


def test_fixed_norm_sum_of_squares_count():
    # r4(n): number of ways as ordered sums of 4 squares = 8 * sum of
    # divisors not divisible by 4 (Jacobi)
    A = [[2, 0, 0, 0], [0, 2, 0, 0], [0, 0, 2, 0], [0, 0, 0, 2]]
    for m, r4 in ((1, 8), (2, 24), (3, 32), (4, 24), (5, 48), (6, 96),
                  (7, 64), (8, 24), (12, 96)):
        assert len(fixed_norm_vectors(A, 2 * m)) == r4
