"""Trace oracle for Hecke operators on weight-k cusp forms of level N.

Implements the holomorphic trace formula in the squarefree-level case:
Tr T(n) on S_k(Gamma_0(N)) for even k >= 4, N squarefree, gcd(n, N) = 1.
Class numbers of imaginary quadratic discriminants are obtained by direct
reduced-form counting, so the oracle is self-contained.

This module certifies Brandt-matrix eigenvalues through the trace identity
for the quaternionic transfer; it never feeds the main computation.
"""
from fractions import Fraction
from math import isqrt

from .padic import prime_factors

__all__ = ["psi_level", "reduced_form_count", "class_number_weighted",
           "trace_hecke", "dim_cusp_forms"]


def psi_level(N: int) -> int:
    """Index of Gamma_0(N) in SL_2(Z) for squarefree N: prod (q+1)."""
    out = 1
    for q in prime_factors(N):
        out *= q + 1
    return out


def reduced_form_count(d: int) -> int:
    """Number of reduced primitive positive binary quadratic forms of disc d.

    d must be negative and congruent to 0 or 1 mod 4.
    """
    if d >= 0 or d % 4 not in (0, 1):
        raise ValueError(f"not an imaginary quadratic discriminant: {d}")
    count = 0
    a = 1
    while 3 * a * a <= -d:
        for b in range(-a + 1, a + 1):
            num = b * b - d
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if a == c and b < 0:
                continue
            g = _gcd3(a, abs(b), c)
            if g == 1:
                count += 1
        a += 1
    return count


def _gcd3(a, b, c):
    from math import gcd
    return gcd(gcd(a, b), c)


def class_number_weighted(d: int) -> Fraction:
    """h(d) with the usual unit weights: h(-3) -> 1/3, h(-4) -> 1/2."""
    if d == -3:
        return Fraction(1, 3)
    if d == -4:
        return Fraction(1, 2)
    return Fraction(reduced_form_count(d))


def _gegenbauer(t: int, n: int, k: int) -> int:
    # P_k(t, n) = U_{k-2} where U_m = t U_{m-1} - n U_{m-2}, U_0 = 1, U_1 = t
    u_prev, u = 1, t
    for _ in range(k - 3):
        u_prev, u = u, t * u - n * u_prev
    return u if k > 2 else 1


def embedding_factor(d: int, p: int) -> int:
    """Optimal-embedding count of the quadratic order of disc d into a local
    Eichler order of level p (p exactly dividing a squarefree level).

    1 + (d|p) in the unramified cases, 1 when p ramifies in the field,
    2 when p divides the conductor of the order.
    """
    from .padic import kronecker
    if d % p:
        return 1 + kronecker(d, p)
    if d % (p * p) == 0 and (d // (p * p)) % 4 in (0, 1):
        return 2
    return 1


def _elliptic_weight(d: int, N: int) -> int:
    out = 1
    for p in prime_factors(N):
        out *= embedding_factor(d, p)
    return out


def trace_hecke(n: int, k: int, N: int) -> int:
    """Tr T(n) on S_k(Gamma_0(N)); even k >= 4, N squarefree, gcd(n,N)=1."""
    from math import gcd
    if k < 4 or k % 2:
        raise ValueError("weight must be even and at least 4")
    if gcd(n, N) != 1:
        raise ValueError("n must be coprime to the level")
    for q in prime_factors(N):
        if N % (q * q) == 0:
            raise ValueError("level must be squarefree")

    s = isqrt(n)
    is_square = s * s == n

    A1 = Fraction(0)
    if is_square:
        A1 = Fraction(k - 1, 12) * psi_level(N) * n ** (k // 2 - 1)

    A2 = Fraction(0)
    t = 0
    while t * t < 4 * n:
        for tt in ({0} if t == 0 else {t, -t}):
            delta = tt * tt - 4 * n
            h_sum = Fraction(0)
            f = 1
            while f * f <= -delta:
                if delta % (f * f) == 0 and (delta // (f * f)) % 4 in (0, 1):
                    d_ord = delta // (f * f)
                    h_sum += (class_number_weighted(d_ord)
                              * _elliptic_weight(d_ord, N))
                f += 1
            A2 += _gegenbauer(tt, n, k) * h_sum
        t += 1
    A2 /= 2

    sigma0 = 2 ** len(prime_factors(N)) if N > 1 else 1
    A3 = Fraction(0)
    d = 1
    while d * d < n:
        if n % d == 0:
            A3 += d ** (k - 1) * sigma0
        d += 1
    if is_square:
        A3 += Fraction(1, 2) * s ** (k - 1) * sigma0

    total = A1 - A2 - A3
    if total.denominator != 1:
        raise ArithmeticError(f"trace formula gave non-integer {total}")
    return int(total)


def dim_cusp_forms(k: int, N: int) -> int:
    """dim S_k(Gamma_0(N)) via Tr T(1)."""
    return trace_hecke(1, k, N)
