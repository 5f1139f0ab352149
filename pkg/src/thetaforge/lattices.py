"""Exact integer lattice routines: HNF, kernels, solving, LLL reduction.

Matrices are lists of rows of python ints. Everything is exact; no floats.
Ranks stay at most 8 (stacked pairs of rank-4 lattices), so the textbook
algorithms are fast enough and entry growth is a non-issue.
"""
from fractions import Fraction

__all__ = [
    "hnf", "hnf_with_transform", "integer_kernel", "solve_integer",
    "in_hnf_span", "reduce_mod_hnf", "det_int", "adjugate",
    "lll_reduce", "gram_matrix", "index_in",
]


def _hnf_core(rows, want_transform):
    rows = [list(map(int, r)) for r in rows]
    m = len(rows)
    n = len(rows[0]) if m else 0
    U = [[1 if x == y else 0 for x in range(m)] for y in range(m)]
    r = 0
    for c in range(n):
        piv = None
        for i in range(r, m):
            if rows[i][c]:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        U[r], U[piv] = U[piv], U[r]
        for i in range(r + 1, m):
            while rows[i][c]:
                q = rows[r][c] // rows[i][c]
                rows[r] = [x - q * y for x, y in zip(rows[r], rows[i])]
                U[r] = [x - q * y for x, y in zip(U[r], U[i])]
                rows[r], rows[i] = rows[i], rows[r]
                U[r], U[i] = U[i], U[r]
        if rows[r][c] < 0:
            rows[r] = [-x for x in rows[r]]
            U[r] = [-x for x in U[r]]
        for i in range(r):
            q = rows[i][c] // rows[r][c]
            if q:
                rows[i] = [x - q * y for x, y in zip(rows[i], rows[r])]
                U[i] = [x - q * y for x, y in zip(U[i], U[r])]
        r += 1
        if r == m:
            break
    if want_transform:
        return rows, U, r
    return [row for row in rows[:r]]


def hnf(rows):
    """Row Hermite form of the lattice spanned by `rows`; zero rows dropped.

    Canonical: pivots positive, entries above a pivot reduced into
    [0, pivot). Two generating sets span the same lattice iff their hnf()
    outputs are equal.
    """
    if not rows:
        return []
    return _hnf_core(rows, False)


def hnf_with_transform(rows):
    """(H, U, rank) with U unimodular, U * rows = H (H keeps its zero rows)."""
    return _hnf_core(rows, True)


def integer_kernel(rows):
    """Basis of {x in Z^m : x * rows = 0} as a list of length-m vectors."""
    if not rows:
        return []
    h, u, rank = hnf_with_transform(rows)
    return [u[i] for i in range(rank, len(rows))]


def solve_integer(rows, target):
    """Some x in Z^m with x * rows = target, or None if no solution."""
    if not rows:
        return None if any(target) else []
    h, u, rank = hnf_with_transform(rows)
    n = len(target)
    t = list(map(int, target))
    y = [0] * len(rows)
    for i in range(rank):
        c = next(cc for cc in range(n) if h[i][cc])
        if t[c] % h[i][c]:
            return None
        q = t[c] // h[i][c]
        y[i] = q
        t = [a - q * b for a, b in zip(t, h[i])]
    if any(t):
        return None
    return [sum(y[i] * u[i][j] for i in range(len(rows))) for j in range(len(rows))]


def reduce_mod_hnf(h, vec):
    """Reduce vec modulo the span of HNF rows h; zero iff vec is in the span."""
    v = list(map(int, vec))
    for row in h:
        c = next(cc for cc in range(len(row)) if row[cc])
        q = v[c] // row[c]
        if q:
            v = [a - q * b for a, b in zip(v, row)]
    return v


def in_hnf_span(h, vec):
    return not any(reduce_mod_hnf(h, vec))


def det_int(mat):
    n = len(mat)
    if n == 1:
        return mat[0][0]
    tot = 0
    for c in range(n):
        if mat[0][c]:
            minor = [[mat[r][cc] for cc in range(n) if cc != c]
                     for r in range(1, n)]
            tot += (-1) ** c * mat[0][c] * det_int(minor)
    return tot


def adjugate(mat):
    """Adjugate: adjugate(M) * M = det(M) * I. Exact, for n <= 5 or so."""
    n = len(mat)
    if n == 1:
        return [[1]]
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[mat[r][c] for c in range(n) if c != j]
                     for r in range(n) if r != i]
            adj[j][i] = (-1) ** (i + j) * det_int(minor)
    return adj


def gram_matrix(basis, bilinear):
    """G[i][j] = b_i * bilinear * b_j^T for integer rows b_i."""
    nb = len(basis)
    n = len(bilinear)
    tmp = [[sum(b[t] * bilinear[t][j] for t in range(n)) for j in range(n)]
           for b in basis]
    return [[sum(tmp[i][t] * basis[j][t] for t in range(n)) for j in range(nb)]
            for i in range(nb)]


def lll_reduce(basis, bilinear, delta=Fraction(3, 4)):
    """LLL-reduce integer rows w.r.t. the positive form x*bilinear*y^T.

    All-integer variant: carries d[i] (leading Gram minors) and
    lam[i][j] = d[j+1]*mu[i][j], so every division below is exact and no
    rational arithmetic appears. Raises ValueError on dependent rows or an
    indefinite form, like the rational version it replaces.
    """
    b = [list(map(int, r)) for r in basis]
    n = len(b)
    if n <= 1:
        return b
    g = gram_matrix(b, bilinear)
    dn, dd = delta.numerator, delta.denominator
    d = [0] * (n + 1)
    d[0] = 1
    lam = [[0] * n for _ in range(n)]

    def red(k, l):
        dl = d[l + 1]
        if 2 * abs(lam[k][l]) <= dl:
            return
        q = (2 * lam[k][l] + dl) // (2 * dl)
        b[k] = [x - q * y for x, y in zip(b[k], b[l])]
        for t in range(n):
            g[k][t] -= q * g[l][t]
        for t in range(n):
            g[t][k] = g[k][t]
        lam[k][l] -= q * dl
        for i in range(l):
            lam[k][i] -= q * lam[l][i]

    k = 1
    kmax = 0
    d[1] = g[0][0]
    if d[1] <= 0:
        raise ValueError("basis rows are dependent or form not definite")
    while k < n:
        if k > kmax:
            kmax = k
            for j in range(k + 1):
                u = g[k][j]
                for i in range(j):
                    u = (d[i + 1] * u - lam[k][i] * lam[j][i]) // d[i]
                if j < k:
                    lam[k][j] = u
                elif u <= 0:
                    raise ValueError(
                        "basis rows are dependent or form not definite")
                else:
                    d[k + 1] = u
        red(k, k - 1)
        if dd * d[k + 1] * d[k - 1] < dn * d[k] ** 2 - dd * lam[k][k - 1] ** 2:
            b[k], b[k - 1] = b[k - 1], b[k]
            g[k], g[k - 1] = g[k - 1], g[k]
            for t in range(n):
                g[t][k], g[t][k - 1] = g[t][k - 1], g[t][k]
            for j in range(k - 1):
                lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
            lam0 = lam[k][k - 1]
            bnew = (d[k - 1] * d[k + 1] + lam0 * lam0) // d[k]
            for i in range(k + 1, kmax + 1):
                t = lam[i][k]
                lam[i][k] = (d[k + 1] * lam[i][k - 1] - lam0 * t) // d[k]
                lam[i][k - 1] = (bnew * t + lam0 * lam[i][k]) // d[k + 1]
            d[k] = bnew
            k = max(1, k - 1)
        else:
            for l in range(k - 2, -1, -1):
                red(k, l)
            k += 1
    return b


def index_in(sup_rows, sub_rows):
    """Index [sup : sub] for full-rank lattices given by generator rows.

    Raises ValueError if sub is not contained in sup.
    """
    coords = []
    for row in sub_rows:
        x = solve_integer(sup_rows, row)
        if x is None:
            raise ValueError("not a sublattice")
        coords.append(x)
    h = hnf(coords)
    if len(h) != len(sup_rows):
        raise ValueError("sublattice not full rank")
    d = 1
    for i, row in enumerate(h):
        c = next(cc for cc in range(len(row)) if row[cc])
        d *= row[c]
    return abs(d)
