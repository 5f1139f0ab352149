"""Homogeneous weight-k coefficient modules and their twisted GL2 action.

A weight-k form takes values in the module of homogeneous polynomials of
degree r = k - 2 in (X, Y).  We use the basis v_j = X^(r/2-j) Y^(r/2+j),
j = -r/2..r/2, stored as a coefficient vector indexed by i = j + r/2, and the
right substitution action (P|g)(X, Y) = P((X, Y) g) twisted by det(g)^(-r/2)
so that the center acts trivially:

    rho(g) P = det(g)^(-r/2) * (P|g).

The pairing <v_m, v_n> = 0 unless m + n = 0, and
<v_n, v_{-n}> = (-1)^(r/2+n) / binom(r, r/2+n); it is rho-invariant for every
unit-determinant g.  Binomials are built as exact integers and inverted once,
so a prime p > r never meets a non-unit denominator.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb

from .errors import BadPrime, SingularMatrix
from .padic import inv_mod


class SymPoly:
    """Coefficient vector of a degree-r homogeneous polynomial.

    coeffs[i] is the coefficient of X^(r-i) Y^i, equivalently of v_(i - r/2).
    modulus None means exact coefficients (int or Fraction); otherwise all
    arithmetic is reduced mod modulus.
    """

    __slots__ = ("k", "r", "modulus", "coeffs")

    def __init__(self, coeffs, k: int, modulus: int | None = None):
        if k < 2 or k % 2:
            raise ValueError(f"weight must be even and at least 2, got {k}")
        self.k = k
        self.r = k - 2
        self.modulus = modulus
        coeffs = list(coeffs)
        if len(coeffs) != self.r + 1:
            raise ValueError(f"weight {k} needs {self.r + 1} coefficients")
        if modulus is not None:
            coeffs = [c % modulus for c in coeffs]
        self.coeffs = tuple(coeffs)

    @classmethod
    def basis_vector(cls, j: int, k: int, modulus=None) -> "SymPoly":
        """The basis polynomial v_j."""
        r = k - 2
        if not -r // 2 <= j <= r // 2:
            raise ValueError(f"basis index {j} out of range for weight {k}")
        c = [0] * (r + 1)
        c[j + r // 2] = 1
        return cls(c, k, modulus)

    def _check(self, other):
        if self.k != other.k or self.modulus != other.modulus:
            raise ValueError("mixed weight or coefficient ring")

    def __add__(self, other):
        self._check(other)
        return SymPoly([a + b for a, b in zip(self.coeffs, other.coeffs)],
                       self.k, self.modulus)

    def __sub__(self, other):
        self._check(other)
        return SymPoly([a - b for a, b in zip(self.coeffs, other.coeffs)],
                       self.k, self.modulus)

    def __neg__(self):
        return SymPoly([-a for a in self.coeffs], self.k, self.modulus)

    def scale(self, c) -> "SymPoly":
        return SymPoly([c * a for a in self.coeffs], self.k, self.modulus)

    def is_zero(self) -> bool:
        return all(a == 0 for a in self.coeffs)

    def __eq__(self, other):
        return (isinstance(other, SymPoly) and self.k == other.k
                and self.modulus == other.modulus and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.k, self.modulus, self.coeffs))

    def __repr__(self):
        return f"SymPoly(k={self.k}, {list(self.coeffs)})"


def sym_power_matrix(g, r: int, modulus: int | None = None):
    """Matrix of P -> P|g on coefficient vectors, no determinant twist.

    g is ((a, b), (c, d)); entry (i_new, i_old) is the X^(r-i_new) Y^(i_new)
    coefficient of (aX + cY)^(r-i_old) (bX + dY)^(i_old).  All entries are
    integer polynomials in the entries of g.
    """
    (a, b), (c, d) = g
    n = r + 1
    mat = [[0] * n for _ in range(n)]
    for i_old in range(n):
        # expand (aX + cY)^(r-i_old) * (bX + dY)^(i_old)
        e1, e2 = r - i_old, i_old
        first = [comb(e1, s) * a ** (e1 - s) * c ** s for s in range(e1 + 1)]
        second = [comb(e2, t) * b ** (e2 - t) * d ** t for t in range(e2 + 1)]
        for s, cf in enumerate(first):
            for t, cs in enumerate(second):
                v = cf * cs
                if modulus is not None:
                    v %= modulus
                mat[s + t][i_old] = (mat[s + t][i_old] + v) % modulus \
                    if modulus is not None else mat[s + t][i_old] + v
    return mat


def _det(g):
    (a, b), (c, d) = g
    return a * d - b * c


def rho_matrix(g, k: int, p: int | None = None, prec: int | None = None):
    """Matrix of rho(g) = det(g)^(-(k-2)/2) (.|g) over Z/p^prec or exact rationals."""
    r = k - 2
    det = _det(g)
    if p is None:
        if det == 0:
            raise SingularMatrix("zero determinant")
        mat = sym_power_matrix(g, r)
        dinv = Fraction(1, 1) / Fraction(det) ** (r // 2)
        return [[dinv * x for x in row] for row in mat]
    if p <= r:
        raise BadPrime(f"p = {p} must exceed r = {r}")
    m = p ** prec
    if det % p == 0:
        raise SingularMatrix(f"determinant {det} is not a unit mod {p}")
    mat = sym_power_matrix(g, r, m)
    dinv = pow(inv_mod(det % m, m), r // 2, m)
    return [[x * dinv % m for x in row] for row in mat]


def rho_act(g, poly: SymPoly, p: int | None = None, prec: int | None = None) -> SymPoly:
    """Apply rho(g) to a polynomial; the ring is inferred from the polynomial."""
    if poly.modulus is None:
        mat = rho_matrix(g, poly.k)
    else:
        if p is None or prec is None:
            raise ValueError("p and prec are required for modular coefficients")
        if p ** prec != poly.modulus:
            raise ValueError("modulus mismatch")
        mat = rho_matrix(g, poly.k, p, prec)
    new = [sum(mat[i][j] * poly.coeffs[j] for j in range(poly.r + 1))
           for i in range(poly.r + 1)]
    return SymPoly(new, poly.k, poly.modulus)


def pair_k(pp: SymPoly, qq: SymPoly, p: int | None = None, prec: int | None = None):
    """The rho-invariant pairing; exact Fraction or residue mod p^prec."""
    pp._check(qq)
    r = pp.r
    if p is not None and p <= r:
        raise BadPrime(f"p = {p} must exceed k - 2 = {r}")
    if pp.modulus is None:
        total = Fraction(0)
        for i in range(r + 1):
            total += Fraction((-1) ** i * pp.coeffs[i] * qq.coeffs[r - i], comb(r, i))
        return total
    m = pp.modulus
    total = 0
    for i in range(r + 1):
        term = pp.coeffs[i] * qq.coeffs[r - i] % m
        term = term * inv_mod(comb(r, i) % m, m) % m
        total = (total + ((-1) ** i) * term) % m
    return total


def pairing_gram(k: int, p: int | None = None, prec: int | None = None):
    """Gram matrix of the pairing on the v_j basis (i-indexed)."""
    r = k - 2
    n = r + 1
    basis = [SymPoly.basis_vector(j - r // 2, k, None if p is None else p ** prec)
             for j in range(n)]
    return [[pair_k(basis[i], basis[j], p, prec) for j in range(n)] for i in range(n)]


def w_vector(n: int, d_k: int, k: int, p: int | None = None,
             prec: int | None = None) -> SymPoly:
    """The distinguished vector p^(n(k-2)/2) * D_K^((k-2)/2) * (XY)^((k-2)/2)."""
    r = k - 2
    scalar = d_k ** (r // 2)
    if n:
        if p is None:
            raise ValueError("a prime is required for conductor-level scaling")
        scalar *= p ** (n * r // 2)
    c = [0] * (r + 1)
    c[r // 2] = scalar
    return SymPoly(c, k, None if p is None else p ** prec)
