"""Ring class groups, CM embedding data, and Gross points.

Pic(O_c), for the order of conductor c inside an imaginary quadratic field
of discriminant -D_K, is modeled by reduced primitive binary quadratic forms
of discriminant -c^2 D_K under Gauss composition.  Composition is computed
through the dictionary

    (a, b, c)  <->  Z a + Z (b + sqrt(disc))/2,

whose norm form is the form itself, so multiplying ideal lattices and reading
off the norm form of the product realizes the group law with no orientation
twist.

A Gross point of conductor c is a right-ideal class together with an optimal
embedding of O_c into its left order, up to conjugation by the left unit
group.  Embeddings are found by exhaustive enumeration of lattice elements
with the reduced trace and norm of the standard generator of O_c (the search
is complete because the norm form is positive definite), and the class group
acts by left multiplication of the embedded ideal followed by transport of
the embedding.  The enumeration is unoriented and splits into orbits under
that action; gross_points returns the orbit of the lexicographically least
point, on which the action is a torsor.
"""

from fractions import Fraction
from math import isqrt

from .errors import (AnomalousSplit, ConductorMismatch, EmbeddingNotFound,
                     HeegnerHypothesisFailed, IndexingGap)
from .lattices import hnf, integer_kernel
from .padic import inv_mod, kronecker, prime_factors
from .quatalg import QLattice, _fingerprint, transporter

__all__ = ["reduced_forms", "principal_form", "reduce_form", "compose",
           "form_inverse", "form_pow", "form_push", "ClassGroup",
           "class_group", "ring_class_number", "split_cyclic",
           "order_generator", "group_generators", "CMSplitting",
           "cm_splitting", "GrossPoint", "gross_points", "galois_act",
           "is_optimal", "form_prime_to"]


# ----- binary quadratic forms ---------------------------------------------

def reduce_form(a, b, c):
    """Standard reduction of a positive definite integral form."""
    while True:
        if c < a:
            a, b, c = c, -b, a
        if -a < b <= a:
            if a == c and b < 0:
                b = -b
            return (a, b, c)
        # translate b into (-a, a]
        t = (b + a - 1) // (2 * a)
        c = c - t * b + t * t * a
        b = b - 2 * t * a


def reduced_forms(disc):
    """All reduced primitive positive definite forms of discriminant disc."""
    if disc >= 0 or disc % 4 not in (0, 1):
        raise ValueError(f"{disc} is not a negative quadratic discriminant")
    out = []
    a = 1
    while 3 * a * a <= -disc:
        for b in range(-a + 1, a + 1):
            num = b * b - disc
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a or (a == c and b < 0):
                continue
            g = _gcd3(a, abs(b), c)
            if g == 1:
                out.append((a, b, c))
        a += 1
    return sorted(out)


def principal_form(disc):
    if disc % 4 == 0:
        return (1, 0, -disc // 4)
    return (1, 1, (1 - disc) // 4)


def _gcd3(a, b, c):
    from math import gcd
    return gcd(gcd(a, b), c)


# elements of K are pairs (x, y) = x + y*sqrt(disc), entries Fraction

def _kmul(u, v, disc):
    return (u[0] * v[0] + disc * u[1] * v[1], u[0] * v[1] + u[1] * v[0])


def _knorm(u, disc):
    return u[0] * u[0] - disc * u[1] * u[1]


def _ktrace_conj(u, v, disc):
    # Tr(u * conj(v))
    return 2 * (u[0] * v[0] - disc * u[1] * v[1])


def _ideal_gens(f, disc):
    a, b, _ = f
    return [(Fraction(a), Fraction(0)), (Fraction(b, 2), Fraction(1, 2))]


def _form_of_lattice(gens, disc):
    """Norm form of the O_disc-lattice spanned by gens (positively oriented)."""
    den = 1
    for u in gens:
        for x in u:
            den = den * x.denominator // _gcd2(den, x.denominator)
    rows = [[int(x * den) for x in u] for u in gens]
    mat = hnf(rows)
    if len(mat) != 2:
        raise IndexingGap("ideal lattice is not of full rank")
    e1 = (Fraction(mat[0][0], den), Fraction(mat[0][1], den))
    e2 = (Fraction(mat[1][0], den), Fraction(mat[1][1], den))
    det = e1[0] * e2[1] - e1[1] * e2[0]
    if det < 0:
        e2 = (-e2[0], -e2[1])
        det = -det
    nl = 2 * det
    A = _knorm(e1, disc) / nl
    B = _ktrace_conj(e1, e2, disc) / nl
    C = _knorm(e2, disc) / nl
    if A.denominator != 1 or B.denominator != 1 or C.denominator != 1:
        raise IndexingGap("norm form of an ideal product is not integral")
    f = reduce_form(int(A), int(B), int(C))
    if _gcd3(f[0], abs(f[1]), f[2]) != 1:
        raise IndexingGap("ideal product gave an imprimitive form")
    return f


def _gcd2(a, b):
    from math import gcd
    return gcd(a, b)


def compose(f1, f2, disc):
    g1 = _ideal_gens(f1, disc)
    g2 = _ideal_gens(f2, disc)
    prods = [_kmul(u, v, disc) for u in g1 for v in g2]
    f = _form_of_lattice(prods, disc)
    # products of norm-a1, norm-a2 ideals have norm a1*a2; the form class
    # of the product is what we return after reduction
    return f


def form_inverse(f):
    return reduce_form(f[0], -f[1], f[2])


def form_pow(f, e, disc):
    if e < 0:
        return form_pow(form_inverse(f), -e, disc)
    acc = principal_form(disc)
    base = f
    while e:
        if e & 1:
            acc = compose(acc, base, disc)
        base = compose(base, base, disc)
        e >>= 1
    return acc


def form_prime_to(f, S, disc):
    """An SL2(Z)-equivalent form whose leading coefficient is prime to S."""
    a, b, c = f
    for box in range(1, 40):
        for x in range(-box, box + 1):
            for y in range(-box, box + 1):
                if _gcd2(abs(x), abs(y)) != 1:
                    continue
                A = a * x * x + b * x * y + c * y * y
                if A == 0 or _gcd2(A, S) != 1:
                    continue
                # complete (x, y) to a unimodular matrix [[x, u], [y, v]]
                u, v = _bezout_column(x, y)
                B = 2 * (a * x * u + c * y * v) + b * (x * v + y * u)
                C = a * u * u + b * u * v + c * v * v
                assert B * B - 4 * A * C == disc
                return (A, B, C)
    raise IndexingGap(f"no representative of {f} prime to {S} in the box")


def _bezout_column(x, y):
    # u, v with x*v - y*u = 1
    old_r, r = x, y
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    # old_s*x + old_t*y = old_r = +-1
    if old_r == 1:
        return -old_t, old_s
    return old_t, -old_s


def form_push(f, disc_from, disc_to):
    """Image of the class of f under extension of ideals to a larger order.

    disc_from must equal disc_to times a perfect square.  The ideal attached
    to f over the small order is extended to the order of discriminant
    disc_to and read back off as a reduced form.  This is the transition map
    between consecutive layers of a conductor tower Pic(O_{c m}) -> Pic(O_c).
    """
    m2, rem = divmod(disc_from, disc_to)
    if rem != 0 or m2 <= 0 or isqrt(m2) ** 2 != m2:
        raise ValueError("disc_from must be disc_to times a positive square")
    m = isqrt(m2)
    a, b, _ = f
    # Z a + Z (b + m sqrt(disc_to))/2, then close under the maximal-at-m order
    g1 = (Fraction(a), Fraction(0))
    g2 = (Fraction(b, 2), Fraction(m, 2))
    om = (Fraction(disc_to % 2, 2), Fraction(1, 2))
    gens = [g1, g2, _kmul(g1, om, disc_to), _kmul(g2, om, disc_to)]
    return _form_of_lattice(gens, disc_to)


# ----- ring class groups ---------------------------------------------------

def _unit_index(DK):
    if DK == 3:
        return 3
    if DK == 4:
        return 2
    return 1


def ring_class_number(DK, p, n):
    """h(O_{p^n}) by the analytic formula, h_K computed by form counting."""
    hK = len(reduced_forms(-DK))
    if n == 0:
        return hK
    chi = kronecker(-DK, p)
    return hK * p ** (n - 1) * (p - chi) // _unit_index(DK)


class ClassGroup:
    """Pic(O_c) for disc = -c^2 D_K, as reduced forms under composition."""

    __slots__ = ("disc", "forms", "_index")

    def __init__(self, disc):
        self.disc = disc
        self.forms = reduced_forms(disc)
        self._index = {f: i for i, f in enumerate(self.forms)}

    def __len__(self):
        return len(self.forms)

    def __iter__(self):
        return iter(self.forms)

    def identity(self):
        return principal_form(self.disc)

    def mul(self, f1, f2):
        return compose(f1, f2, self.disc)

    def inv(self, f):
        return form_inverse(f)

    def pow(self, f, e):
        return form_pow(f, e, self.disc)

    def element_order(self, f):
        e = 1
        acc = f
        ident = self.identity()
        while acc != ident:
            acc = self.mul(acc, f)
            e += 1
            if e > len(self.forms):
                raise IndexingGap("element order exceeds the group order")
        return e


def class_group(DK, p, n):
    if (-DK) % 4 not in (0, 1) or not _is_fundamental(-DK):
        raise ValueError(f"-{DK} is not a fundamental discriminant")
    if p == 2 or DK % p == 0:
        raise ValueError("p must be odd and prime to D_K")
    G = ClassGroup(-DK * p ** (2 * n))
    want = ring_class_number(DK, p, n)
    if len(G) != want:
        raise IndexingGap(
            f"form count {len(G)} disagrees with the class number formula "
            f"{want} at disc {G.disc}")
    return G


def _is_fundamental(d):
    if d % 4 == 1:
        return _squarefree(-d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and _squarefree(-m)
    return False


def _squarefree(m):
    for q in prime_factors(m):
        if m % (q * q) == 0:
            return False
    return True


def group_generators(G: ClassGroup):
    """A short generating list, greedily extending the spanned subgroup."""
    gens = []
    spanned = {G.identity()}
    for f in G.forms:
        if f in spanned:
            continue
        gens.append(f)
        new = set(spanned)
        frontier = set(spanned)
        while frontier:
            frontier = {G.mul(g, f) for g in frontier} - new
            new |= frontier
        spanned = new
        if len(spanned) == len(G):
            break
    return gens


def split_cyclic(G: ClassGroup, p):
    """Decompose Pic(O_{p^n}) as (cyclic p-part) x (prime-to-p part).

    Returns (p_part_forms, delta_forms, proj) where proj sends a form to its
    p-part component; proj is the group-algebra projector's backbone.
    """
    h = len(G)
    disc = -G.disc
    n2 = 0
    while disc % (p * p) == 0:
        disc //= p * p
        n2 += 1
    DK = disc
    hdelta = ring_class_number(DK, p, 1) if n2 >= 1 else h
    if hdelta % p == 0:
        raise AnomalousSplit(
            f"p = {p} divides h(O_p) = {hdelta}; the prime-to-p splitting "
            "assumption fails for this configuration")
    pm = 1
    while h % p == 0:
        h //= p
        pm *= p
    m = h  # order of the prime-to-p part
    if pm != p ** max(n2 - 1, 0):
        raise AnomalousSplit(
            f"p-part has order {pm}, expected p^{max(n2 - 1, 0)}")
    if pm == 1:
        e = 0
    else:
        e = m * inv_mod(m % pm, pm) % (m * pm)
    p_part = sorted({form_pow(f, e, G.disc) for f in G.forms})
    delta = sorted({form_pow(f, pm, G.disc) for f in G.forms})
    if len(p_part) != pm or len(delta) != m:
        raise AnomalousSplit("direct product decomposition failed")

    def proj(f):
        return form_pow(f, e, G.disc)

    return p_part, delta, proj


# ----- CM embedding data ---------------------------------------------------

def order_generator(disc):
    """(reduced trace, reduced norm) of the standard generator of O_disc."""
    if disc % 4 == 0:
        return 0, -disc // 4
    return 1, (1 - disc) // 4


class CMSplitting:
    """An embedding of O_K into a quaternion order, with the orthogonal j.

    theta generates O_K (fundamental discriminant -D_K); w is the image of
    sqrt(-D_K); j anticommutes with the embedded field and j^2 = beta < 0 is
    a square at the primes dividing Mp and a unit at those dividing D_K.
    """

    __slots__ = ("alg", "order", "DK", "DKp", "theta", "w", "j", "beta",
                 "M", "p")

    def __init__(self, alg, order, DK, DKp, theta, w, j, beta, M, p):
        self.alg = alg
        self.order = order
        self.DK = DK
        self.DKp = DKp
        self.theta = theta
        self.w = w
        self.j = j
        self.beta = beta
        self.M = M
        self.p = p

    def psi(self, x, y):
        """Image of x + y*sqrt(-D_K), rational x, y."""
        return tuple(Fraction(x) * e + Fraction(y) * wc
                     for e, wc in zip((1, 0, 0, 0), self.w))

    def ideal_gens(self, form, n):
        """Quaternion generators of the embedded ideal of the form.

        The form has discriminant -p^{2n} D_K and corresponds to the lattice
        Z A + Z (B + p^n sqrt(-D_K))/2.
        """
        A, B, _ = form
        g1 = (Fraction(A), Fraction(0), Fraction(0), Fraction(0))
        pn = self.p ** n
        g2 = tuple((Fraction(B) * e + pn * wc) / 2
                   for e, wc in zip((1, 0, 0, 0), self.w))
        return [g1, g2]


def cm_splitting(order: QLattice, DK, M, p):
    alg = order.alg
    D = alg.disc()
    if not _is_fundamental(-DK):
        raise ValueError(f"-{DK} is not a fundamental discriminant")
    for q in prime_factors(D):
        if kronecker(-DK, q) != -1:
            raise HeegnerHypothesisFailed(
                f"prime {q} | D is not inert in Q(sqrt(-{DK}))")
    for q in prime_factors(M):
        if kronecker(-DK, q) != 1:
            raise HeegnerHypothesisFailed(
                f"prime {q} | M is not split in Q(sqrt(-{DK}))")
    if M * D * DK % p == 0:
        raise HeegnerHypothesisFailed(f"p = {p} divides M*D*D_K")

    DKp = DK if DK % 2 else DK // 2
    t0 = DKp
    n0 = (DKp * DKp + DK) // 4
    theta = None
    for cand in sorted(order.elements_of_norm(n0)):
        if alg.trd(cand) == t0:
            theta = cand
            break
    if theta is None:
        raise EmbeddingNotFound(
            f"no element of trace {t0}, norm {n0} in the order")
    w = tuple(2 * c - (t0 if idx == 0 else 0)
              for idx, c in enumerate(theta))

    # j must be orthogonal to 1 and w; over the integer coordinate lattice
    # that is a rank-2 kernel, searched in expanding shells
    grow = _int_row(_gram_row(alg, w))
    cond = [[1 if i == 0 else 0, grow[i]] for i in range(4)]
    ker = integer_kernel(cond)
    assert len(ker) == 2
    bad = M * p
    for box in range(1, 60):
        for s in range(-box, box + 1):
            for t in range(-box, box + 1):
                if abs(s) != box and abs(t) != box:
                    continue
                j = tuple(s * ker[0][c] + t * ker[1][c] for c in range(4))
                if all(x == 0 for x in j):
                    continue
                beta = -alg.nrd(j)
                if not _beta_ok(beta, M, p, DK):
                    continue
                return CMSplitting(alg, order, DK, DKp, theta, w, j,
                                   beta, M, p)
    raise EmbeddingNotFound("no admissible orthogonal j in the search box")


def _gram_row(alg, w):
    # row of trd(e_i * conj(w)) over the standard algebra basis
    out = []
    for i in range(4):
        e = tuple(1 if c == i else 0 for c in range(4))
        out.append(alg.trd(alg.mult(e, alg.conj(w))))
    return out


def _int_row(row):
    den = 1
    for x in row:
        den = den * Fraction(x).denominator
    return [int(Fraction(x) * den) for x in row]


def _beta_ok(beta, M, p, DK):
    if beta >= 0:
        return False
    for q in set(prime_factors(M)) | {p}:
        b = beta % q
        if q == 2:
            if beta % 8 != 1:
                return False
        elif b == 0 or kronecker(b, q) != 1:
            return False
    for q in prime_factors(DK):
        if beta % q == 0:
            return False
    return True


# ----- Gross points --------------------------------------------------------

class GrossPoint:
    """Ideal class plus optimal embedding, canonical under unit conjugation."""

    __slots__ = ("cls", "y", "disc")

    def __init__(self, cls, y, disc):
        self.cls = cls
        self.y = y
        self.disc = disc

    def key(self):
        return (self.cls, self.y)

    def __eq__(self, other):
        return (isinstance(other, GrossPoint) and self.cls == other.cls
                and self.y == other.y and self.disc == other.disc)

    def __hash__(self):
        return hash((self.cls, self.y, self.disc))

    def __repr__(self):
        return f"GrossPoint(cls={self.cls}, disc={self.disc}, y={self.y})"


def is_optimal(L: QLattice, y, disc, p):
    """Certify that Z[y] sits in L as the order of discriminant disc exactly."""
    alg = L.alg
    t0, n0 = order_generator(disc)
    if alg.trd(y) != t0 or alg.nrd(y) != n0:
        return False
    if not L.contains(y):
        return False
    if (-disc) % (p * p):
        return True  # fundamental at p, nothing below
    if disc % 4:
        sub = tuple((Fraction(p - 1) * (1 if c == 0 else 0) + 2 * yc)
                    / (2 * p) for c, yc in enumerate(y))
    else:
        sub = tuple(Fraction(yc, p) for yc in y)
    return not L.contains(sub)


def _canonical(alg, units, y):
    best = None
    for u in units:
        nu = alg.nrd(u)
        z = alg.mult(alg.mult(u, y), alg.conj(u))
        z = tuple(Fraction(c, nu) for c in z)
        if best is None or z < best:
            best = z
    return best


def _classify(cs, J, nrd_J, fps):
    fp = None
    if len(cs.ideals) > 1:
        fp = _fingerprint(J, nrd_J)
    for j, (I, nI) in enumerate(zip(cs.ideals, cs.nrds)):
        if fp is not None and fp != fps[j]:
            continue
        g = transporter(J, I, nrd_J, nI)
        if g is not None:
            return j, g
    raise IndexingGap("ideal matches no class representative")


class GrossPointSet:
    """All Gross points of one conductor, with the Pic-torsor action.

    points is a single orbit (the one through the least point in the
    enumeration order); all_points is the full unoriented set.
    """

    def __init__(self, cs, split: CMSplitting, n):
        self.cs = cs
        self.split = split
        self.n = n
        self.p = split.p
        self.disc = -split.DK * split.p ** (2 * n)
        self.group = ClassGroup(self.disc)
        self._fps = None
        if len(cs.ideals) > 1:
            self._fps = [_fingerprint(I, nI)
                         for I, nI in zip(cs.ideals, cs.nrds)]
        self.all_points = self._enumerate()
        base = min(self.all_points, key=GrossPoint.key)
        self.points = self._orbit(base)

    def _enumerate(self):
        alg = self.cs.alg
        t0, n0 = order_generator(self.disc)
        found = []
        for i, L in enumerate(self.cs.left_orders):
            seen = set()
            for y in L.elements_of_norm(n0):
                if alg.trd(y) != t0:
                    continue
                if not is_optimal(L, y, self.disc, self.p):
                    continue
                cy = _canonical(alg, self.cs.units[i], y)
                if cy not in seen:
                    seen.add(cy)
                    found.append(GrossPoint(i, cy, self.disc))
        expected = self._expected_count()
        if len(found) != expected:
            raise EmbeddingNotFound(
                f"enumerated {len(found)} optimal embeddings, expected "
                f"{expected} from the Eichler count")
        return found

    def _expected_count(self):
        h = len(self.group)
        mult = 1
        for q in prime_factors(self.cs.D):
            mult *= 1 - kronecker(-self.split.DK, q)
        for q in prime_factors(self.cs.M):
            mult *= 1 + kronecker(-self.split.DK, q)
        return h * mult

    def act(self, form, x: GrossPoint):
        if form[1] ** 2 - 4 * form[0] * form[2] != self.disc:
            raise ConductorMismatch(
                f"form of disc {form[1] ** 2 - 4 * form[0] * form[2]} "
                f"acting at disc {self.disc}")
        form = reduce_form(*form)
        if x.disc != self.disc:
            raise ConductorMismatch(
                f"point at disc {x.disc}, group at {self.disc}")
        alg = self.cs.alg
        t0, _ = order_generator(self.disc)
        A, B, _C = form_prime_to(form, self.p * self.cs.D * self.cs.M * 2,
                                 self.disc)
        I = self.cs.ideals[x.cls]
        nI = self.cs.nrds[x.cls]
        # generators A and (B - t0)/2 + y of the embedded ideal
        sh = Fraction(B - t0, 2)
        g2 = tuple(sh * (1 if c == 0 else 0) + yc
                   for c, yc in enumerate(x.y))
        rows = []
        den = 1
        for g in [(Fraction(A), Fraction(0), Fraction(0), Fraction(0)), g2]:
            for b in I.basis():
                prod = alg.mult(g, b)
                for c in prod:
                    den = den * c.denominator // _gcd2(den, c.denominator)
                rows.append(prod)
        mat = [[int(c * den) for c in prod] for prod in rows]
        J = QLattice(alg, mat, den)
        nJ = nI * A
        jdx, g = _classify(self.cs, J, nJ, self._fps)
        ng = alg.nrd(g)
        y2 = alg.mult(alg.mult(alg.conj(g), x.y), g)
        y2 = tuple(Fraction(c, ng) for c in y2)
        Lj = self.cs.left_orders[jdx]
        if not is_optimal(Lj, y2, self.disc, self.p):
            raise IndexingGap("transported embedding lost optimality")
        return GrossPoint(jdx, _canonical(alg, self.cs.units[jdx], y2),
                          self.disc)

    def generators(self):
        """A small generating set of the class group."""
        return group_generators(self.group)

    def _orbit(self, x):
        out = [x]
        seen = {x}
        frontier = [x]
        gens = self.generators()
        while frontier:
            nxt = []
            for pt in frontier:
                for f in gens:
                    q = self.act(f, pt)
                    if q not in seen:
                        seen.add(q)
                        nxt.append(q)
                        out.append(q)
            frontier = nxt
        return sorted(out, key=GrossPoint.key)


def gross_points(cs, split: CMSplitting, n):
    return GrossPointSet(cs, split, n)


def galois_act(gps: GrossPointSet, form, x: GrossPoint):
    return gps.act(form, x)
