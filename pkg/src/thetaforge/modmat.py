"""Dense matrix helpers over Z/m with a numpy fast path.

Matrices are lists of lists of Python ints (always canonical residues).
numpy int64 is used for multiplication only when the worst-case accumulator
provably fits; otherwise plain integer arithmetic keeps everything exact.
"""

from __future__ import annotations

import numpy as np

from .padic import inv_mod
from .errors import SingularMatrix


def mat_mul(a, b, m: int):
    n, k = len(a), len(b)
    cols = len(b[0])
    if n and k and n * k * cols >= 512 and k * (m - 1) ** 2 < 2 ** 62:
        arr = (np.array(a, dtype=np.int64) @ np.array(b, dtype=np.int64)) % m
        return [[int(x) for x in row] for row in arr]
    out = [[0] * cols for _ in range(n)]
    for i in range(n):
        ai = a[i]
        oi = out[i]
        for t in range(k):
            v = ai[t]
            if v:
                bt = b[t]
                for j in range(cols):
                    oi[j] += v * bt[j]
        for j in range(cols):
            oi[j] %= m
    return out


def mat_add(a, b, m: int):
    return [[(x + y) % m for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a, b, m: int):
    return [[(x - y) % m for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(a, c, m: int):
    return [[x * c % m for x in row] for row in a]


def mat_vec(a, v, m: int):
    return [sum(x * y for x, y in zip(row, v)) % m for row in a]


def identity(n: int):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def zeros(n: int, k: int | None = None):
    return [[0] * (k if k is not None else n) for _ in range(n)]


def mat_eq(a, b) -> bool:
    return all(ra == rb for ra, rb in zip(a, b))


def mat_inv(a, p: int, prec: int):
    """Inverse over Z/p^prec by elimination with unit pivots; needs unit determinant."""
    m = p ** prec
    n = len(a)
    work = [row[:] + identity(n)[i] for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if work[r][col] % p), None)
        if piv is None:
            raise SingularMatrix("matrix is not invertible at the working prime")
        work[col], work[piv] = work[piv], work[col]
        inv = inv_mod(work[col][col], m)
        work[col] = [x * inv % m for x in work[col]]
        for r in range(n):
            if r != col and work[r][col]:
                f = work[r][col]
                work[r] = [(x - f * y) % m for x, y in zip(work[r], work[col])]
    return [row[n:] for row in work]


def nullspace_mod_p(a, p: int):
    """Basis of the right kernel of a over F_p."""
    rows = len(a)
    if rows == 0:
        return []
    cols = len(a[0])
    work = [[x % p for x in row] for row in a]
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if work[i][c]), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        inv = inv_mod(work[r][c], p)
        work[r] = [x * inv % p for x in work[r]]
        for i in range(rows):
            if i != r and work[i][c]:
                f = work[i][c]
                work[i] = [(x - f * y) % p for x, y in zip(work[i], work[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * cols
        v[fc] = 1
        for i, pc in enumerate(pivots):
            v[pc] = (-work[i][fc]) % p
        basis.append(v)
    return basis


def rank_mod_p(a, p: int) -> int:
    if not a:
        return 0
    return len(a[0]) - len(nullspace_mod_p(a, p))


def nullspace_prime_power(a, p: int, prec: int):
    """Vectors spanning the kernel of a over Z/p^prec that lift from the mod-p kernel.

    Lifts each mod-p kernel vector through successive powers when possible;
    vectors that stop lifting are dropped (sufficient for free rank-one use).
    """
    m = p ** prec
    out = []
    for v in nullspace_mod_p(a, p):
        v = [x % m for x in v]
        ok = True
        for j in range(1, prec):
            resid = mat_vec(a, v, m)
            if all(x % p ** (j + 1) == 0 for x in resid):
                continue
            target = [(-x // p ** j) % p for x in resid]
            sol = solve_mod_p(a, target, p)
            if sol is None:
                ok = False
                break
            v = [(x + p ** j * s) % m for x, s in zip(v, sol)]
        if ok and all(x % p ** prec == 0 for x in mat_vec(a, v, m)):
            out.append(v)
    return out


def solve_mod_p(a, b, p: int):
    """One solution of a x = b over F_p, or None."""
    rows, cols = len(a), len(a[0])
    work = [[x % p for x in row] + [bv % p] for row, bv in zip(a, b)]
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if work[i][c]), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        inv = inv_mod(work[r][c], p)
        work[r] = [x * inv % p for x in work[r]]
        for i in range(rows):
            if i != r and work[i][c]:
                f = work[i][c]
                work[i] = [(x - f * y) % p for x, y in zip(work[i], work[r])]
        pivots.append(c)
        r += 1
    for i in range(r, rows):
        if work[i][cols] % p:
            return None
    x = [0] * cols
    for i, pc in enumerate(pivots):
        x[pc] = work[i][cols]
    return x
