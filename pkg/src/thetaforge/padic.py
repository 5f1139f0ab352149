"""Exact arithmetic in Z/p^M, Hensel lifting, and p-power cyclotomic layers.

Everything here is plain integer arithmetic: a PadicInt is a canonical residue
at an explicitly fixed (p, M), and mixing precisions or primes is an error
rather than a silent coercion.  CycloElt models Z/p^M [x] / Phi_{p^n}(x) for
character evaluation; its exponent reduction uses x^(p^n) = 1 together with
the relation sum_{i<p} x^(i p^(n-1)) = 0.
"""

from __future__ import annotations

from .errors import BadPrime, NotOrdinary, NotSquare, PrecisionExhausted


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n), defined for all integers with the usual extensions."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    if n % 2 == 0 and a % 2 == 0:
        return 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    # n = 2^e * m with m odd; (a|2) depends on a mod 8
    while n % 2 == 0:
        n //= 2
        if a % 8 in (3, 5):
            result = -result
    a %= n
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def inv_mod(a: int, m: int) -> int:
    """Inverse of a modulo m; a must be a unit."""
    g, x = _xgcd(a % m, m)
    if g != 1:
        raise ZeroDivisionError(f"{a} is not invertible modulo {m}")
    return x % m


def is_prime(n: int) -> bool:
    """Trial division; all primes in this package are desk-sized."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list:
    """Sorted distinct prime factors of |n|."""
    n = abs(n)
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1 if f == 2 else 2
    if n > 1:
        out.append(n)
    return out


def primes_up_to(n: int) -> list:
    sieve = bytearray([1]) * (n + 1) if n >= 0 else bytearray()
    out = []
    for q in range(2, n + 1):
        if sieve[q]:
            out.append(q)
            for m in range(q * q, n + 1, q):
                sieve[m] = 0
    return out


def _xgcd(a: int, b: int):
    x0, x1 = 1, 0
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
    return a, x0


class PadicInt:
    """Residue in Z/p^M with precision tracked explicitly."""

    __slots__ = ("p", "prec", "val")

    def __init__(self, value: int, p: int, prec: int):
        if prec < 1:
            raise PrecisionExhausted("precision must be at least 1")
        self.p = p
        self.prec = prec
        self.val = value % (p ** prec)

    @property
    def modulus(self) -> int:
        return self.p ** self.prec

    def _check(self, other: "PadicInt"):
        if self.p != other.p or self.prec != other.prec:
            raise ValueError("mixed (p, prec) arithmetic is not allowed")

    def __add__(self, other):
        other = self._coerce(other)
        self._check(other)
        return PadicInt(self.val + other.val, self.p, self.prec)

    def __radd__(self, other):
        return self.__add__(other)

    def __sub__(self, other):
        other = self._coerce(other)
        self._check(other)
        return PadicInt(self.val - other.val, self.p, self.prec)

    def __rsub__(self, other):
        return self._coerce(other).__sub__(self)

    def __mul__(self, other):
        other = self._coerce(other)
        self._check(other)
        return PadicInt(self.val * other.val, self.p, self.prec)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __neg__(self):
        return PadicInt(-self.val, self.p, self.prec)

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return PadicInt(pow(self.val, e, self.modulus), self.p, self.prec)

    def _coerce(self, other):
        if isinstance(other, PadicInt):
            return other
        if isinstance(other, int):
            return PadicInt(other, self.p, self.prec)
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, int):
            return self.val == other % self.modulus
        return (isinstance(other, PadicInt) and self.p == other.p
                and self.prec == other.prec and self.val == other.val)

    def __hash__(self):
        return hash((self.p, self.prec, self.val))

    def is_unit(self) -> bool:
        return self.val % self.p != 0

    def valuation(self) -> int:
        """p-adic valuation, capped at the precision for the zero residue."""
        if self.val == 0:
            return self.prec
        v, x = 0, self.val
        while x % self.p == 0:
            x //= self.p
            v += 1
        return v

    def unit_part(self) -> "PadicInt":
        v = self.valuation()
        if v >= self.prec:
            raise PrecisionExhausted("zero residue has no unit part")
        return PadicInt(self.val // self.p ** v, self.p, self.prec)

    def inverse(self) -> "PadicInt":
        if not self.is_unit():
            raise ZeroDivisionError("inverse of a non-unit residue")
        return PadicInt(inv_mod(self.val, self.modulus), self.p, self.prec)

    def reduce(self, prec: int) -> "PadicInt":
        if prec > self.prec:
            raise PrecisionExhausted("cannot increase precision by reduction")
        return PadicInt(self.val, self.p, prec)

    def exact_divide(self, power: int) -> "PadicInt":
        """Divide by p^power, requiring exact divisibility; loses that much precision."""
        if power == 0:
            return self
        if self.prec - power < 1:
            raise PrecisionExhausted("no precision left after division")
        if self.val % self.p ** power != 0:
            raise PrecisionExhausted(
                f"residue {self.val} not divisible by {self.p}^{power}")
        return PadicInt(self.val // self.p ** power, self.p, self.prec - power)

    def lift_centered(self) -> int:
        """Symmetric lift in (-p^M/2, p^M/2]."""
        m = self.modulus
        return self.val - m if self.val > m // 2 else self.val

    def __repr__(self):
        return f"{self.val} + O({self.p}^{self.prec})"


def hensel_sqrt(a: int, p: int, prec: int) -> int:
    """Square root of the unit square a in Z/p^prec, root residue in [1,(p-1)/2] mod p."""
    if p == 2:
        raise BadPrime("p = 2 is outside the supported range")
    a0 = a % p
    if a0 == 0:
        raise NotSquare(f"{a} is not a unit modulo {p}")
    if pow(a0, (p - 1) // 2, p) != 1:
        raise NotSquare(f"{a} is not a square modulo {p}")
    # Tonelli-Shanks mod p, then Newton steps double the precision.
    r = _sqrt_mod_p(a0, p)
    if r > (p - 1) // 2:
        r = p - r
    known = 1
    while known < prec:
        known = min(2 * known, prec)
        m = p ** known
        r = (r + (a - r * r) * inv_mod(2 * r, m)) % m
    return r % (p ** prec)


def _sqrt_mod_p(a: int, p: int) -> int:
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    # Tonelli-Shanks for p = 1 mod 4
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        t2, i = t, 0
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


def hensel_unit_root(a_p: int, p: int, k: int, prec: int) -> PadicInt:
    """Unit root of the Hecke polynomial X^2 - a_p X + p^(k-1) in Z/p^prec.

    The root is congruent to a_p mod p; ordinarity (p not dividing a_p) is
    required for the unit root to exist and for Newton iteration to converge.
    """
    if a_p % p == 0:
        raise NotOrdinary(f"a_p = {a_p} is divisible by {p}")
    pk = p ** (k - 1)
    alpha = a_p % p
    known = 1
    while known < prec:
        known = min(2 * known, prec)
        m = p ** known
        f = (alpha * alpha - a_p * alpha + pk) % m
        df = (2 * alpha - a_p) % m
        alpha = (alpha - f * inv_mod(df, m)) % m
    return PadicInt(alpha, p, prec)


class CycloElt:
    """Element of Z/p^M [zeta] with zeta a primitive p^n-th root of unity.

    Stored on the power basis 1, zeta, ..., zeta^(phi(p^n)-1); multiplication
    first folds exponents modulo p^n and then eliminates exponents >= phi(p^n)
    through the minimal relation of zeta.
    """

    __slots__ = ("p", "n", "prec", "coeffs")

    def __init__(self, coeffs, p: int, n: int, prec: int):
        self.p = p
        self.n = n
        self.prec = prec
        deg = self.degree(p, n)
        if len(coeffs) != deg:
            raise ValueError(f"expected {deg} coefficients, got {len(coeffs)}")
        m = p ** prec
        self.coeffs = tuple(c % m for c in coeffs)

    @staticmethod
    def degree(p: int, n: int) -> int:
        return 1 if n == 0 else (p - 1) * p ** (n - 1)

    @classmethod
    def zero(cls, p, n, prec):
        return cls([0] * cls.degree(p, n), p, n, prec)

    @classmethod
    def one(cls, p, n, prec):
        c = [0] * cls.degree(p, n)
        c[0] = 1
        return cls(c, p, n, prec)

    @classmethod
    def zeta_power(cls, e: int, p: int, n: int, prec: int) -> "CycloElt":
        """The basis element zeta^e (any integer e, folded into the ring)."""
        acc = [0] * cls.degree(p, n)
        cls._accumulate(acc, e, 1, p, n)
        return cls(acc, p, n, prec)

    @staticmethod
    def _accumulate(acc, e, c, p, n):
        """Add c * zeta^e onto the coefficient accumulator, reducing the exponent."""
        if n == 0:
            acc[0] += c
            return
        pn = p ** n
        deg = (p - 1) * p ** (n - 1)
        e %= pn
        if e < deg:
            acc[e] += c
        else:
            # zeta^(deg + j) = -sum_{i < p-1} zeta^(j + i p^(n-1))
            j = e - deg
            step = p ** (n - 1)
            for i in range(p - 1):
                acc[j + i * step] -= c
            # j < p^(n-1) guarantees every folded exponent is already reduced

    def _check(self, other):
        if (self.p, self.n, self.prec) != (other.p, other.n, other.prec):
            raise ValueError("mixed cyclotomic layers")

    def __add__(self, other):
        self._check(other)
        return CycloElt([a + b for a, b in zip(self.coeffs, other.coeffs)],
                        self.p, self.n, self.prec)

    def __sub__(self, other):
        self._check(other)
        return CycloElt([a - b for a, b in zip(self.coeffs, other.coeffs)],
                        self.p, self.n, self.prec)

    def __neg__(self):
        return CycloElt([-a for a in self.coeffs], self.p, self.n, self.prec)

    def __mul__(self, other):
        if isinstance(other, int):
            return CycloElt([a * other for a in self.coeffs],
                            self.p, self.n, self.prec)
        self._check(other)
        acc = [0] * len(self.coeffs)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    self._accumulate(acc, i + j, a * b, self.p, self.n)
        return CycloElt(acc, self.p, self.n, self.prec)

    def __rmul__(self, other):
        return self.__mul__(other)

    def galois(self, s: int) -> "CycloElt":
        """Apply the automorphism zeta -> zeta^s (s prime to p)."""
        if self.n > 0 and s % self.p == 0:
            raise ValueError("galois exponent must be prime to p")
        acc = [0] * len(self.coeffs)
        for i, a in enumerate(self.coeffs):
            if a:
                self._accumulate(acc, i * s, a, self.p, self.n)
        return CycloElt(acc, self.p, self.n, self.prec)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __eq__(self, other):
        return (isinstance(other, CycloElt)
                and (self.p, self.n, self.prec) == (other.p, other.n, other.prec)
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.p, self.n, self.prec, self.coeffs))

    def __repr__(self):
        return f"CycloElt(p={self.p}, n={self.n}, prec={self.prec}, {list(self.coeffs)})"
