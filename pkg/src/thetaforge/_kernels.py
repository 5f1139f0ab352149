"""Fixed-norm vector enumeration in small positive-definite lattices.

This is the one hot loop in the package: unit groups, transporter searches
and embedding searches all reduce to listing every integer vector z with
z * A * z^T == target (optionally constrained to z == residues mod m).

Three paths, all returning the identical sorted list:
  - numba: @njit Fincke-Pohst with float64 interval bounds and an exact
    int64 recheck of every candidate;
  - numpy: same interval logic in python, innermost axis vectorized;
  - python: exact big-integer Fincke-Pohst with rational Cholesky, used
    whenever int64 safety cannot be certified in advance (and available
    explicitly for cross-checking).

THETAFORGE_NO_NUMBA=1 disables the numba path at import time. The float
bounds are only ever used to *over*-cover the search interval (inflated by
an absolute margin); membership itself is always decided exactly.
"""
import os
from fractions import Fraction
from math import isqrt

import numpy as np

from .lattices import adjugate, det_int

__all__ = ["fixed_norm_vectors", "numba_available"]

_NO_NUMBA = os.environ.get("THETAFORGE_NO_NUMBA", "") == "1"
if not _NO_NUMBA:
    try:
        from numba import njit
    except ImportError:
        _NO_NUMBA = True

_INT64_CAP = 1 << 61


def numba_available():
    return not _NO_NUMBA


if not _NO_NUMBA:

    @njit(cache=True)
    def _enum4_numba(R, A, T, res, d, marg, out):
        count = 0
        sT = np.sqrt(T) if T > 0 else 0.0
        rad3 = sT / R[3, 3] + marg[3]
        lo = int(np.ceil(-rad3))
        z3 = lo + ((res[3] - lo) % d)
        while z3 <= rad3:
            L3 = R[3, 3] * z3
            s2 = T - L3 * L3
            c2 = -(R[2, 3] * z3) / R[2, 2]
            rad2 = (np.sqrt(s2) if s2 > 0 else 0.0) / R[2, 2] + marg[2]
            lo = int(np.ceil(c2 - rad2))
            z2 = lo + ((res[2] - lo) % d)
            while z2 <= c2 + rad2:
                L2 = R[2, 2] * z2 + R[2, 3] * z3
                s1 = s2 - L2 * L2
                c1 = -(R[1, 2] * z2 + R[1, 3] * z3) / R[1, 1]
                rad1 = (np.sqrt(s1) if s1 > 0 else 0.0) / R[1, 1] + marg[1]
                lo = int(np.ceil(c1 - rad1))
                z1 = lo + ((res[1] - lo) % d)
                while z1 <= c1 + rad1:
                    L1 = R[1, 1] * z1 + R[1, 2] * z2 + R[1, 3] * z3
                    s0 = s1 - L1 * L1
                    c0 = -(R[0, 1] * z1 + R[0, 2] * z2 + R[0, 3] * z3) / R[0, 0]
                    rad0 = (np.sqrt(s0) if s0 > 0 else 0.0) / R[0, 0] + marg[0]
                    lo = int(np.ceil(c0 - rad0))
                    z0 = lo + ((res[0] - lo) % d)
                    while z0 <= c0 + rad0:
                        q = (A[0, 0] * z0 * z0 + A[1, 1] * z1 * z1
                             + A[2, 2] * z2 * z2 + A[3, 3] * z3 * z3
                             + 2 * (A[0, 1] * z0 * z1 + A[0, 2] * z0 * z2
                                    + A[0, 3] * z0 * z3 + A[1, 2] * z1 * z2
                                    + A[1, 3] * z1 * z3 + A[2, 3] * z2 * z3))
                        if q == T:
                            if count < out.shape[0]:
                                out[count, 0] = z0
                                out[count, 1] = z1
                                out[count, 2] = z2
                                out[count, 3] = z3
                            count += 1
                        z0 += d
                    z1 += d
                z2 += d
            z3 += d
        return count


def _enum4_numpy(R, A, T, res, d, marg):
    out = []
    sT = T ** 0.5 if T > 0 else 0.0
    a00, a01, a02, a03 = A[0]
    rad3 = sT / R[3][3] + marg[3]
    lo = int(np.ceil(-rad3))
    z3 = lo + ((res[3] - lo) % d)
    while z3 <= rad3:
        L3 = R[3][3] * z3
        s2 = T - L3 * L3
        c2 = -(R[2][3] * z3) / R[2][2]
        rad2 = (s2 ** 0.5 if s2 > 0 else 0.0) / R[2][2] + marg[2]
        lo = int(np.ceil(c2 - rad2))
        z2 = lo + ((res[2] - lo) % d)
        while z2 <= c2 + rad2:
            L2 = R[2][2] * z2 + R[2][3] * z3
            s1 = s2 - L2 * L2
            c1 = -(R[1][2] * z2 + R[1][3] * z3) / R[1][1]
            rad1 = (s1 ** 0.5 if s1 > 0 else 0.0) / R[1][1] + marg[1]
            lo = int(np.ceil(c1 - rad1))
            z1 = lo + ((res[1] - lo) % d)
            while z1 <= c1 + rad1:
                L1 = R[1][1] * z1 + R[1][2] * z2 + R[1][3] * z3
                s0 = s1 - L1 * L1
                c0 = -(R[0][1] * z1 + R[0][2] * z2 + R[0][3] * z3) / R[0][0]
                rad0 = (s0 ** 0.5 if s0 > 0 else 0.0) / R[0][0] + marg[0]
                lo = int(np.ceil(c0 - rad0))
                z0lo = lo + ((res[0] - lo) % d)
                z0hi = int(np.floor(c0 + rad0))
                if z0lo <= z0hi:
                    z0s = np.arange(z0lo, z0hi + 1, d, dtype=np.int64)
                    # quadratic in z0 with exact small coefficients
                    bq = 2 * (a01 * z1 + a02 * z2 + a03 * z3)
                    cq = (A[1][1] * z1 * z1 + A[2][2] * z2 * z2
                          + A[3][3] * z3 * z3
                          + 2 * (A[1][2] * z1 * z2 + A[1][3] * z1 * z3
                                 + A[2][3] * z2 * z3))
                    q = a00 * z0s * z0s + bq * z0s + (cq - T)
                    for z0 in z0s[q == 0]:
                        out.append((int(z0), z1, z2, z3))
                z1 += d
            z2 += d
        z3 += d
    return out


def _ldl(A):
    n = len(A)
    m = [[Fraction(A[i][j]) for j in range(n)] for i in range(n)]
    diag = [Fraction(0)] * n
    u = [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
    for i in range(n):
        diag[i] = m[i][i]
        if diag[i] <= 0:
            raise ValueError("form not positive definite")
        for j in range(i + 1, n):
            u[i][j] = m[i][j] / m[i][i]
        for r in range(i + 1, n):
            for c in range(i + 1, n):
                m[r][c] -= m[r][i] * m[i][c] / m[i][i]
    return diag, u


def _int_range(ctr, rad2):
    # exact integer bounds of {z : (z - ctr)^2 <= rad2}, fractions in, ints out
    if rad2 < 0:
        return 1, 0
    a, b = ctr.numerator, ctr.denominator
    P, Q = rad2.numerator, rad2.denominator
    s = isqrt(P * b * b // Q) + 2

    def ok_hi(z):
        w = z * b - a
        return w <= 0 or Q * w * w <= P * b * b

    def ok_lo(z):
        w = z * b - a
        return w >= 0 or Q * w * w <= P * b * b

    hi = (a + s) // b
    while not ok_hi(hi):
        hi -= 1
    while ok_hi(hi + 1):
        hi += 1
    lo = -((-(a - s)) // b)
    while not ok_lo(lo):
        lo += 1
    while ok_lo(lo - 1):
        lo -= 1
    return lo, hi


def _enum_exact(A, T, res, d):
    n = len(A)
    diag, u = _ldl(A)
    out = []
    z = [0] * n

    def descend(level, remaining):
        # remaining = T - sum of completed outer squares (Fraction)
        ctr = -sum(u[level][j] * z[j] for j in range(level + 1, n))
        if not isinstance(ctr, Fraction):
            ctr = Fraction(ctr)
        rad2 = remaining / diag[level]
        lo, hi = _int_range(ctr, rad2)
        zi = lo + ((res[level] - lo) % d)
        while zi <= hi:
            z[level] = zi
            term = diag[level] * (zi - ctr) ** 2
            if level == 0:
                if term == remaining:
                    out.append(tuple(z))
            else:
                descend(level - 1, remaining - term)
            zi += d
        z[level] = 0

    descend(n - 1, Fraction(T))
    return out


def _box_bounds(A, T):
    det = det_int(A)
    if det <= 0:
        raise ValueError("form not positive definite")
    adj = adjugate(A)
    return [isqrt(T * adj[i][i] // det) for i in range(len(A))], det


def fixed_norm_vectors(gram, target, residues=None, modulus=1, _path=None):
    """All z in Z^n with z*gram*z^T == target and z == residues (mod modulus).

    gram: symmetric positive-definite integer matrix, n <= 4. Returns a
    lexicographically sorted list of int tuples (deterministic across
    paths). target < 0 gives []; target == 0 gives [0] only when the
    residue class allows it.
    """
    n = len(gram)
    if n > 4:
        raise ValueError("rank > 4 not supported")
    A = [[int(gram[i][j]) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(n):
            if A[i][j] != A[j][i]:
                raise ValueError("gram not symmetric")
    d = int(modulus)
    res = [0] * n if residues is None else [int(r) % d for r in residues]
    if target < 0:
        return []
    if target == 0:
        return [tuple([0] * n)] if all(r == 0 for r in res) else []

    bounds, det = _box_bounds(A, target)

    # pad to 4 variables; the huge dummy diagonal forces z_pad = 0
    pad = 4 - n
    if pad:
        big = 4 * (target + 1)
        A4 = [row[:] + [0] * pad for row in A]
        for t in range(pad):
            extra = [0] * 4
            extra[n + t] = big
            A4.append(extra)
        res4 = res + [0] * pad
        bounds4 = bounds + [0] * pad
    else:
        A4, res4, bounds4 = A, res, bounds

    # certify the int64 arithmetic of the fast paths, with margin headroom
    safe = all(b + 16 < (1 << 31) for b in bounds4)
    if safe:
        tot = sum(abs(A4[i][j]) * (bounds4[i] + 16) * (bounds4[j] + 16)
                  for i in range(4) for j in range(4))
        safe = tot < _INT64_CAP and target < _INT64_CAP

    path = _path
    if path is None:
        if not safe:
            path = "python"
        elif _NO_NUMBA:
            path = "numpy"
        else:
            path = "numba"
    if path in ("numba", "numpy") and not safe:
        raise ValueError("instance not int64-safe; use the python path")
    if path == "numba" and _NO_NUMBA:
        raise ValueError("numba path unavailable")

    if path == "python":
        raw = _enum_exact(A, target, res, d)
        return sorted(raw)

    Af = np.array(A4, dtype=np.float64)
    try:
        L = np.linalg.cholesky(Af)
    except np.linalg.LinAlgError:
        return sorted(_enum_exact(A, target, res, d))
    R = np.ascontiguousarray(L.T)
    marg = np.array([1e-6 * (target ** 0.5) / R[i, i] + 1.0 for i in range(4)])
    Ai = np.array(A4, dtype=np.int64)
    resi = np.array(res4, dtype=np.int64)

    if path == "numba":
        cap = 4096
        while True:
            out = np.empty((cap, 4), dtype=np.int64)
            cnt = _enum4_numba(R, Ai, np.int64(target), resi, np.int64(d),
                               marg, out)
            if cnt <= cap:
                raw = [tuple(int(x) for x in out[i, :n]) for i in range(cnt)]
                break
            cap = cnt
    else:
        raw4 = _enum4_numpy(R.tolist(), A4, target, res4, d, marg.tolist())
        raw = [t[:n] for t in raw4]
    return sorted(raw)
