"""Definite quaternion algebras over Q: orders, ideals, class sets.

Elements are 4-tuples (x0, x1, x2, x3) meaning x0 + x1*i + x2*j + x3*k over
the basis with i^2 = a, j^2 = b, k = ij = -ji (a, b < 0). Lattices carry an
integer row matrix plus a global denominator, always stored in canonical
HNF so that equality of lattices is equality of representations.

The two workhorses are QLattice.elements_of_norm (dispatching to the
enumeration kernels) and LocalSplitting (an explicit isomorphism
O tensor Z/q^prec = M_2(Z/q^prec) built by Hensel-lifting a rank-1
idempotent; every splitting self-certifies by checking the ring
homomorphism property on basis products at full precision).
"""
from fractions import Fraction
from math import gcd, isqrt

from ._kernels import fixed_norm_vectors
from .errors import MassMismatch, NotDefinite
from .lattices import (adjugate, det_int, hnf, in_hnf_span, lll_reduce,
                       solve_integer)
from .modmat import nullspace_mod_p
from .padic import inv_mod, is_prime, prime_factors

__all__ = [
    "hilbert_symbol", "ramified_primes", "choose_algebra",
    "QuaternionAlgebra", "QLattice", "maximal_order", "eichler_order",
    "LocalSplitting", "radical_ideal", "qneighbors", "transporter",
    "eichler_mass", "ClassSet", "right_ideal_classes",
]


def _two_val(n):
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    return v, n


def hilbert_symbol(a: int, b: int, q) -> int:
    """(a, b)_q for nonzero integers; q a prime or the string 'inf'."""
    if a == 0 or b == 0:
        raise ValueError("hilbert symbol needs nonzero entries")
    if q == "inf":
        return -1 if (a < 0 and b < 0) else 1
    if q == 2:
        alpha, u = _two_val(abs(a))
        beta, v = _two_val(abs(b))
        u = u if a > 0 else -u
        v = v if b > 0 else -v
        eps_u, eps_v = (u - 1) // 2, (v - 1) // 2
        om_u, om_v = (u * u - 1) // 8, (v * v - 1) // 8
        e = eps_u * eps_v + alpha * om_v + beta * om_u
        return -1 if e % 2 else 1
    alpha = 0
    while a % q == 0:
        a //= q
        alpha += 1
    beta = 0
    while b % q == 0:
        b //= q
        beta += 1
    from .padic import kronecker
    e = alpha * beta * ((q - 1) // 2)
    s = (-1) ** (e % 2)
    if beta % 2:
        s *= kronecker(a, q)
    if alpha % 2:
        s *= kronecker(b, q)
    return s


def ramified_primes(a: int, b: int) -> list:
    """Finite ramified primes of the algebra (a, b / Q), sorted."""
    cand = set(prime_factors(2 * a * b)) | {2}
    ram = sorted(q for q in cand if hilbert_symbol(a, b, q) == -1)
    at_inf = hilbert_symbol(a, b, "inf") == -1
    if (len(ram) + (1 if at_inf else 0)) % 2:
        raise ArithmeticError("hilbert symbol product formula violated")
    return ram


def choose_algebra(disc: int) -> "QuaternionAlgebra":
    """Definite algebra with ramified set exactly the primes of `disc`.

    disc must be squarefree with an odd number of prime factors. The search
    order is fixed, so the choice is deterministic.
    """
    target = prime_factors(disc)
    if len(target) % 2 == 0:
        raise NotDefinite(f"{disc} has an even number of prime factors")
    cands = []
    for r in [1, 2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]:
        cands.append((-r, -disc))
        cands.append((-disc, -r))
    for r in range(2, 3000):
        if is_prime(r):
            cands.append((-r, -disc))
            cands.append((-r, -2 * disc))
    for a, b in cands:
        if ramified_primes(a, b) == target:
            return QuaternionAlgebra(a, b)
    raise NotDefinite(f"no small definite algebra found for disc {disc}")


class QuaternionAlgebra:
    __slots__ = ("a", "b", "coord_gram", "_disc")

    def __init__(self, a: int, b: int):
        if a >= 0 or b >= 0:
            raise NotDefinite("need a < 0 and b < 0")
        self.a = a
        self.b = b
        self.coord_gram = [[2, 0, 0, 0], [0, -2 * a, 0, 0],
                           [0, 0, -2 * b, 0], [0, 0, 0, 2 * a * b]]
        self._disc = None

    def disc(self) -> int:
        if self._disc is None:
            d = 1
            for q in ramified_primes(self.a, self.b):
                d *= q
            self._disc = d
        return self._disc

    def mult(self, x, y):
        a, b = self.a, self.b
        return (
            x[0] * y[0] + a * x[1] * y[1] + b * x[2] * y[2] - a * b * x[3] * y[3],
            x[0] * y[1] + x[1] * y[0] - b * x[2] * y[3] + b * x[3] * y[2],
            x[0] * y[2] + a * x[1] * y[3] + x[2] * y[0] - a * x[3] * y[1],
            x[0] * y[3] + x[1] * y[2] - x[2] * y[1] + x[3] * y[0],
        )

    @staticmethod
    def conj(x):
        return (x[0], -x[1], -x[2], -x[3])

    @staticmethod
    def trd(x):
        return 2 * x[0]

    def nrd(self, x):
        a, b = self.a, self.b
        return (x[0] * x[0] - a * x[1] * x[1] - b * x[2] * x[2]
                + a * b * x[3] * x[3])

    def one(self):
        return (1, 0, 0, 0)


def _content(mat, den):
    g = den
    for row in mat:
        for x in row:
            g = gcd(g, x)
    return g


class QLattice:
    """Full-rank lattice in B: integer rows `mat` over denominator `den`."""

    __slots__ = ("alg", "mat", "den", "_red", "_adj", "_det")

    def __init__(self, alg, mat, den=1):
        if den == 0:
            raise ZeroDivisionError("denominator 0")
        if den < 0:
            den = -den
            mat = [[-x for x in row] for row in mat]
        mat = hnf(mat)
        if len(mat) != 4:
            raise ValueError("lattice is not full rank")
        g = _content(mat, den)
        if g > 1:
            mat = [[x // g for x in row] for row in mat]
            den //= g
        self.alg = alg
        self.mat = tuple(tuple(row) for row in mat)
        self.den = den
        self._red = None
        self._adj = None
        self._det = None

    def __eq__(self, other):
        return (isinstance(other, QLattice) and self.mat == other.mat
                and self.den == other.den)

    def __hash__(self):
        return hash((self.mat, self.den))

    def __repr__(self):
        return f"QLattice(den={self.den}, mat={self.mat})"

    def basis(self):
        d = self.den
        return [tuple(Fraction(x, d) for x in row) for row in self.mat]

    def reduced_mat(self):
        if self._red is None:
            self._red = [list(r) for r in
                         lll_reduce([list(r) for r in self.mat],
                                    self.alg.coord_gram)]
        return self._red

    def reduced_basis(self):
        d = self.den
        return [tuple(Fraction(x, d) for x in row) for row in self.reduced_mat()]

    def det_abs(self):
        if self._det is None:
            self._det = abs(det_int([list(r) for r in self.mat]))
        return self._det

    def scale(self, c):
        c = Fraction(c)
        num, den = c.numerator, c.denominator
        mat = [[x * num for x in row] for row in self.mat]
        return QLattice(self.alg, mat, self.den * den)

    def add(self, other):
        l = self.den * other.den // gcd(self.den, other.den)
        rows = [[x * (l // self.den) for x in row] for row in self.mat]
        rows += [[x * (l // other.den) for x in row] for row in other.mat]
        return QLattice(self.alg, rows, l)

    def multiply(self, other):
        rows = []
        for r1 in self.mat:
            for r2 in other.mat:
                rows.append(list(self.alg.mult(r1, r2)))
        return QLattice(self.alg, rows, self.den * other.den)

    def conjugate(self):
        mat = [[row[0], -row[1], -row[2], -row[3]] for row in self.mat]
        return QLattice(self.alg, mat, self.den)

    def intersect(self, other):
        l = self.den * other.den // gcd(self.den, other.den)
        A = [[x * (l // self.den) for x in row] for row in self.mat]
        B = [[x * (l // other.den) for x in row] for row in other.mat]
        from .lattices import integer_kernel
        ker = integer_kernel(A + [[-x for x in row] for row in B])
        rows = []
        for v in ker:
            rows.append([sum(v[i] * A[i][c] for i in range(4)) for c in range(4)])
        return QLattice(self.alg, rows, l)

    def contains(self, elt):
        v = []
        for x in elt:
            w = Fraction(x) * self.den
            if w.denominator != 1:
                return False
            v.append(w.numerator)
        return in_hnf_span([list(r) for r in self.mat], v)

    def coords_of(self, elt):
        """Fraction coordinates of elt w.r.t. the canonical basis rows."""
        if self._adj is None:
            m = [list(r) for r in self.mat]
            self._adj = adjugate(m)
            if self._det is None:
                self._det = abs(det_int(m))
        d = det_int([list(r) for r in self.mat])
        adj = self._adj
        return tuple(
            Fraction(sum(Fraction(elt[t]) * adj[t][i] for t in range(4))
                     * self.den, d)
            for i in range(4))

    def index_over(self, sub):
        """Fractional index [self : sub] = covolume ratio (a Fraction)."""
        return (Fraction(abs(det_int([list(r) for r in sub.mat])), sub.den ** 4)
                / Fraction(self.det_abs(), self.den ** 4))

    def even_gram(self):
        """Integer G on the reduced basis with x G x^T = 2 den^2 nrd(sum x_t b_t)."""
        red = self.reduced_mat()
        A = self.alg.coord_gram
        tmp = [[sum(r[t] * A[t][j] for t in range(4)) for j in range(4)]
               for r in red]
        return [[sum(tmp[i][t] * red[j][t] for t in range(4)) for j in range(4)]
                for i in range(4)]

    def elements_of_norm(self, t, path=None):
        """All x in the lattice with nrd(x) == t (t rational), as tuples."""
        t = Fraction(t)
        target = 2 * t * self.den ** 2
        if target.denominator != 1:
            return []
        sols = fixed_norm_vectors(self.even_gram(), target.numerator,
                                  _path=path)
        red = self.reduced_mat()
        d = self.den
        out = []
        for z in sols:
            coords = [sum(z[t2] * red[t2][c] for t2 in range(4))
                      for c in range(4)]
            out.append(tuple(Fraction(c, d) for c in coords))
        return out

    def is_order(self):
        one = (Fraction(1), Fraction(0), Fraction(0), Fraction(0))
        if not self.contains(one):
            return False
        bas = self.basis()
        for x in bas:
            for y in bas:
                if not self.contains(self.alg.mult(x, y)):
                    return False
        return True


def reduced_discriminant(order: QLattice) -> int:
    """Reduced discriminant of an order: sqrt|det trd(b_i conj(b_j))|."""
    bas = order.basis()
    alg = order.alg
    T = [[alg.trd(alg.mult(x, alg.conj(y))) for y in bas] for x in bas]
    for row in T:
        for v in row:
            if Fraction(v).denominator != 1:
                raise ValueError("trace form not integral; not an order")
    d2 = abs(det_int([[int(v) for v in row] for row in T]))
    r = isqrt(d2)
    if r * r != d2:
        raise ValueError("discriminant not a perfect square")
    return r


def _ring_closure(lat, max_den):
    cur = lat
    for _ in range(8):
        nxt = cur.add(cur.multiply(cur))
        if nxt == cur:
            return cur
        if nxt.den > max_den:
            return None
        cur = nxt
    return None


def maximal_order(alg: QuaternionAlgebra) -> QLattice:
    """A maximal order, by saturating Z<1,i,j,k> prime by prime."""
    D = alg.disc()
    L = QLattice(alg, [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    rd = reduced_discriminant(L)
    while rd != D:
        defect = rd // D
        q = prime_factors(defect)[0]
        improved = None
        for code in range(1, q ** 4):
            v = [(code // q ** t) % q for t in range(4)]
            # candidate x = (sum v_t b_t) / q; coords over den*q stay integral
            xrow = [sum(v[t] * L.mat[t][c] for t in range(4)) for c in range(4)]
            x = tuple(Fraction(c, L.den * q) for c in xrow)
            if (Fraction(alg.trd(x)).denominator != 1
                    or Fraction(alg.nrd(x)).denominator != 1):
                continue
            cand = QLattice(alg, [xrow] + [[y * q for y in row]
                                           for row in L.mat], L.den * q)
            closed = _ring_closure(cand, L.den * q)
            if closed is None or closed == L:
                continue
            try:
                rd_new = reduced_discriminant(closed)
            except ValueError:
                continue
            if rd_new < rd and rd_new % D == 0:
                improved = (closed, rd_new)
                break
        if improved is None:
            raise ArithmeticError(f"saturation stuck at disc {rd} (q={q})")
        L, rd = improved
    return L


def eichler_mass(D: int, M: int) -> Fraction:
    """Eichler mass of level-M order in disc-D algebra (both squarefree)."""
    m = Fraction(1, 12)
    for q in prime_factors(D):
        m *= (q - 1)
    for q in prime_factors(M):
        m *= (q + 1)
    return m


class LocalSplitting:
    """Explicit O tensor Z/q^prec = M_2(Z/q^prec) for q coprime to disc(O).

    Stores the images of the order basis; `matrix_of` maps any element whose
    O-coordinates are q-integral. Construction self-certifies: the images
    must satisfy the full multiplication table mod q^prec, and trace/norm
    must map to matrix trace/determinant.
    """

    __slots__ = ("order", "q", "prec", "mod", "images", "_struct",
                 "_trd_tab", "_nrd_tab")

    def __init__(self, order: QLattice, q: int, prec: int):
        self.order = order
        self.q = q
        self.prec = prec
        self.mod = q ** prec
        self._struct = self._structure_constants()
        self._trd_tab, self._nrd_tab = self._form_tables()
        e = self._find_idempotent()
        e = self._hensel_lift(e)
        self.images = self._matrix_units(e)
        self._certify()

    def _structure_constants(self):
        order, alg = self.order, self.order.alg
        bas = order.basis()
        table = []
        for s in range(4):
            row = []
            for t in range(4):
                coords = order.coords_of(alg.mult(bas[s], bas[t]))
                assert all(c.denominator == 1 for c in coords), \
                    "order not multiplicatively closed"
                row.append(tuple(int(c) for c in coords))
            table.append(row)
        return table

    def _mul_coords(self, x, y, mod):
        st = self._struct
        out = [0, 0, 0, 0]
        for s in range(4):
            if not x[s]:
                continue
            for t in range(4):
                if not y[t]:
                    continue
                c = x[s] * y[t]
                row = st[s][t]
                for i in range(4):
                    out[i] += c * row[i]
        return [v % mod for v in out]

    def _form_tables(self):
        # trd and nrd restricted to the order are integer-valued even when
        # the basis matrix carries a denominator
        alg = self.order.alg
        bas = self.order.basis()
        trds = []
        for b in bas:
            t = Fraction(alg.trd(b))
            assert t.denominator == 1
            trds.append(int(t))
        gram = [[0] * 4 for _ in range(4)]
        for s in range(4):
            for t in range(4):
                v = Fraction(alg.trd(alg.mult(bas[s], alg.conj(bas[t]))))
                assert v.denominator == 1
                gram[s][t] = int(v)
        return trds, gram

    def _trd_coords(self, x, mod):
        return sum(x[t] * self._trd_tab[t] for t in range(4)) % mod

    def _nrd_coords(self, x, mod):
        g = self._nrd_tab
        total = 0
        for s in range(4):
            total += x[s] * x[s] * (g[s][s] // 2)
            for t in range(s + 1, 4):
                total += x[s] * x[t] * g[s][t]
        return total % mod

    def _one_coords(self, mod):
        c = self.order.coords_of((1, 0, 0, 0))
        return [int(v) % mod for v in c]

    def _find_idempotent(self):
        q = self.q
        for code in range(1, q ** 4):
            x = [(code // q ** t) % q for t in range(4)]
            if self._nrd_coords(x, q) == 0 and self._trd_coords(x, q) != 0:
                tinv = inv_mod(self._trd_coords(x, q), q)
                return [v * tinv % q for v in x]
        raise ArithmeticError(f"no rank-1 idempotent mod {q}; ramified prime?")

    def _hensel_lift(self, e):
        # e <- 3e^2 - 2e^3 doubles the precision of e^2 == e each pass
        mod = self.mod
        e = [v % mod for v in e]
        for _ in range(self.prec.bit_length() + 1):
            e2 = self._mul_coords(e, e, mod)
            if e2 == e:
                break
            e3 = self._mul_coords(e2, e, mod)
            e = [(3 * a - 2 * b) % mod for a, b in zip(e2, e3)]
        assert self._mul_coords(e, e, mod) == e, "idempotent lift failed"
        return e

    def _matrix_units(self, e11):
        mod, q = self.mod, self.q
        one = self._one_coords(mod)
        e22 = [(a - b) % mod for a, b in zip(one, e11)]
        basis_vecs = [[1 if t == s else 0 for t in range(4)] for s in range(4)]
        idx11 = next(i for i in range(4) if e11[i] % q)
        pick = None
        for bx in basis_vecs:
            e12 = self._mul_coords(self._mul_coords(e11, bx, mod), e22, mod)
            for by in basis_vecs:
                e21 = self._mul_coords(self._mul_coords(e22, by, mod), e11,
                                       mod)
                prod = self._mul_coords(e12, e21, mod)
                lam = prod[idx11] * inv_mod(e11[idx11], mod) % mod
                if lam % q:
                    pick = (e12, [v * inv_mod(lam, mod) % mod for v in e21])
                    break
            if pick:
                break
        if not pick:
            raise ArithmeticError("failed to build matrix units")
        e12, e21 = pick
        idx12 = next(i for i in range(4) if e12[i] % q)
        idx21 = next(i for i in range(4) if e21[i] % q)
        idx22 = next(i for i in range(4) if e22[i] % q)

        def entry(z, left, right, ref, idx):
            w = self._mul_coords(self._mul_coords(left, z, mod), right, mod)
            c = w[idx] * inv_mod(ref[idx], mod) % mod
            return c

        images = []
        for bx in basis_vecs:
            aa = entry(bx, e11, e11, e11, idx11)
            bb = entry(bx, e11, e22, e12, idx12)
            cc = entry(bx, e22, e11, e21, idx21)
            dd = entry(bx, e22, e22, e22, idx22)
            images.append([[aa, bb], [cc, dd]])
        return images

    def _certify(self):
        mod = self.mod
        st = self._struct
        M = self.images
        for s in range(4):
            for t in range(4):
                prod = [[(M[s][0][0] * M[t][0][0] + M[s][0][1] * M[t][1][0]) % mod,
                         (M[s][0][0] * M[t][0][1] + M[s][0][1] * M[t][1][1]) % mod],
                        [(M[s][1][0] * M[t][0][0] + M[s][1][1] * M[t][1][0]) % mod,
                         (M[s][1][0] * M[t][0][1] + M[s][1][1] * M[t][1][1]) % mod]]
                want = [[0, 0], [0, 0]]
                for u in range(4):
                    c = st[s][t][u]
                    for r in range(2):
                        for cc in range(2):
                            want[r][cc] = (want[r][cc] + c * M[u][r][cc]) % mod
                assert prod == want, "splitting is not a ring homomorphism"
        for t in range(4):
            tr = (M[t][0][0] + M[t][1][1]) % mod
            dt = (M[t][0][0] * M[t][1][1] - M[t][0][1] * M[t][1][0]) % mod
            x = [1 if s == t else 0 for s in range(4)]
            assert tr == self._trd_coords(x, mod), "trace mismatch"
            assert dt == self._nrd_coords(x, mod), "norm mismatch"

    def matrix_of_coords(self, x):
        """2x2 matrix of an element given by integral O-coordinates."""
        mod = self.mod
        out = [[0, 0], [0, 0]]
        for t in range(4):
            c = x[t] % mod
            if c:
                Mt = self.images[t]
                out[0][0] = (out[0][0] + c * Mt[0][0]) % mod
                out[0][1] = (out[0][1] + c * Mt[0][1]) % mod
                out[1][0] = (out[1][0] + c * Mt[1][0]) % mod
                out[1][1] = (out[1][1] + c * Mt[1][1]) % mod
        return out

    def matrix_of(self, elt):
        """2x2 matrix of an algebra element with q-integral O-coordinates."""
        coords = self.order.coords_of(elt)
        mod = self.mod
        x = []
        for c in coords:
            if c.denominator % self.q == 0:
                raise ValueError("element not q-integral for this order")
            x.append(c.numerator * inv_mod(c.denominator, mod) % mod)
        return self.matrix_of_coords(x)


def eichler_order(max_order: QLattice, M: int) -> QLattice:
    """Level-M Eichler order inside a maximal order (M squarefree, M ∤ D)."""
    R = max_order
    alg = R.alg
    for q in prime_factors(M):
        sp = LocalSplitting(R, q, 1)
        # keep x with lower-left entry of i_q(x) == 0 mod q
        rows_cond = [[sp.images[t][1][0] for t in range(4)]]
        ker = nullspace_mod_p(rows_cond, q)
        rows = []
        for v in ker:
            rows.append([sum(v[t] * R.mat[t][c] for t in range(4))
                         for c in range(4)])
        for r in R.mat:
            rows.append([q * x for x in r])
        R = QLattice(alg, rows, R.den)
    return R


def radical_ideal(order: QLattice, q: int) -> QLattice:
    """The two-sided prime P_q above a ramified q: P_q^2 = q * order."""
    alg = order.alg
    bas = order.basis()
    T = [[int(alg.trd(alg.mult(x, y))) % q for y in bas] for x in bas]
    ker = nullspace_mod_p(T, q)
    if len(ker) != 2:
        raise ArithmeticError(f"radical at {q} has wrong dimension; q ramified?")
    rows = []
    for v in ker:
        rows.append([sum(v[t] * order.mat[t][c] for t in range(4))
                     for c in range(4)])
    for r in order.mat:
        rows.append([q * x for x in r])
    return QLattice(alg, rows, order.den)


def ideal_norm(order: QLattice, ideal: QLattice) -> Fraction:
    """Reduced norm of a right order-ideal: sqrt of the covolume index."""
    idx = order.index_over(ideal)
    num, den = idx.numerator, idx.denominator
    rn, rd = isqrt(num), isqrt(den)
    if rn * rn != num or rd * rd != den:
        raise ArithmeticError("ideal index is not a perfect square")
    return Fraction(rn, rd)


def left_order(ideal: QLattice, nrd: Fraction) -> QLattice:
    return ideal.multiply(ideal.conjugate()).scale(Fraction(1) / nrd)


def _nullspace_rows(conds, q):
    """Solutions mod q of a stack of linear conditions on 4 coordinates."""
    if not conds:
        return [[1 if t == s else 0 for t in range(4)] for s in range(4)]
    mat = [list(c) for c in conds]
    return nullspace_mod_p(mat, q)


def qneighbors(order: QLattice, splitting: LocalSplitting, ideal: QLattice,
               nrd_ideal: Fraction):
    """The q+1 right-ideal q-neighbors of `ideal` (q split in the order).

    splitting must be a LocalSplitting of `order` at q with prec >= 1.
    Returns a list of (neighbor, nrd) pairs with nrd = q * nrd_ideal.
    """
    q = splitting.q
    alg = order.alg
    # local generator: x0 in ideal with nrd(x0)/nrd(ideal) prime to q
    x0 = None
    s = 1
    while x0 is None:
        if s % q:
            for cand in ideal.elements_of_norm(nrd_ideal * s):
                x0 = cand
                break
        s += 1
        if s > 200:
            raise ArithmeticError("no local generator found")
    lines = [(1, t) for t in range(q)] + [(0, 1)]
    out = []
    for c1, c2 in lines:
        # {r : both columns of i_q(r) lie on the line (c1, c2)} is a right
        # ideal of R/qR; column conditions, not row conditions
        conds = []
        for colj in range(2):
            conds.append([
                (splitting.images[t][0][colj] * c2
                 - splitting.images[t][1][colj] * c1) % q
                for t in range(4)])
        ker = _nullspace_rows(conds, q)
        rows = []
        for v in ker:
            w = [sum(v[t] * order.mat[t][c] for t in range(4))
                 for c in range(4)]
            elt = tuple(Fraction(x, order.den) for x in w)
            prod = alg.mult(x0, elt)
            scaled = [Fraction(p) * ideal.den * order.den for p in prod]
            assert all(f.denominator == 1 for f in scaled)
            rows.append([int(f) for f in scaled])
        for r in ideal.mat:
            rows.append([q * x * order.den for x in r])
        out.append((QLattice(alg, rows, ideal.den * order.den),
                    nrd_ideal * q))
    return out


def transporter(X: QLattice, J: QLattice, nrd_X: Fraction, nrd_J: Fraction,
                find_all=False):
    """gamma with gamma * J == X (right ideals of one order), or None.

    All candidates lie in C = X * conj(J) / nrd(J) and are exactly the
    vectors of C of norm nrd(X)/nrd(J).
    """
    C = X.multiply(J.conjugate()).scale(Fraction(1) / nrd_J)
    t = nrd_X / nrd_J
    sols = C.elements_of_norm(t)
    if find_all:
        return sols
    return sols[0] if sols else None


def unit_group(order: QLattice):
    """All units (norm-1 elements) of an order, as quaternion tuples."""
    return order.elements_of_norm(1)


class ClassSet:
    """Right ideal classes of an Eichler order, with mass certificate.

    ideals[0] is the order itself. All representatives have norm a power of
    the auxiliary prime q0 (hence coprime to everything the caller cares
    about). left_orders[i] and units[i] go with ideals[i].
    """

    __slots__ = ("alg", "order", "D", "M", "q0", "ideals", "nrds",
                 "left_orders", "units", "mass")

    def __init__(self, alg, order, D, M, q0, ideals, nrds, left_orders,
                 units, mass):
        self.alg = alg
        self.order = order
        self.D = D
        self.M = M
        self.q0 = q0
        self.ideals = ideals
        self.nrds = nrds
        self.left_orders = left_orders
        self.units = units
        self.mass = mass

    def __len__(self):
        return len(self.ideals)


def _fingerprint(lat: QLattice, nrd, depth=5):
    sig = []
    for s in range(1, depth + 1):
        sig.append(len(lat.elements_of_norm(nrd * s)))
    return tuple(sig)


def right_ideal_classes(order: QLattice, D: int, M: int, q0: int = None,
                        avoid: int = 1) -> ClassSet:
    """BFS over q0-neighbors until the Eichler mass is certified.

    q0 defaults to the smallest prime coprime to D*M*avoid and to the order
    denominator, so all class representatives have norm a power of a prime
    the caller never cares about. Raises MassMismatch if the walk closes
    before (or overshoots) the mass.
    """
    alg = order.alg
    if q0 is None:
        q0 = 2
        while (D * M * avoid * order.den) % q0 == 0 or not is_prime(q0):
            q0 += 1
    sp = LocalSplitting(order, q0, 1)
    mass = eichler_mass(D, M)

    ideals = [order]
    nrds = [Fraction(1)]
    lorders = [order]
    units = [unit_group(order)]
    fps = [_fingerprint(order, Fraction(1))]
    total = Fraction(2, len(units[0]))

    frontier = [0]
    while total != mass and frontier:
        new_frontier = []
        for idx in frontier:
            for J, nJ in qneighbors(order, sp, ideals[idx], nrds[idx]):
                fp = _fingerprint(J, nJ)
                found = False
                for i2 in range(len(ideals)):
                    if fps[i2] != fp:
                        continue
                    if transporter(J, ideals[i2], nJ, nrds[i2]) is not None:
                        found = True
                        break
                if not found:
                    ideals.append(J)
                    nrds.append(nJ)
                    lo = left_order(J, nJ)
                    lorders.append(lo)
                    units.append(unit_group(lo))
                    fps.append(fp)
                    total += Fraction(2, len(units[-1]))
                    new_frontier.append(len(ideals) - 1)
                    if total > mass:
                        raise MassMismatch(
                            f"unit mass {total} exceeds Eichler mass {mass}")
        frontier = new_frontier
    if total != mass:
        raise MassMismatch(
            f"walk closed at mass {total}, expected {mass}")
    return ClassSet(alg, order, D, M, q0, ideals, nrds, lorders, units, mass)
