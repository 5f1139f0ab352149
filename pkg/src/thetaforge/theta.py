"""Theta elements of a definite quaternionic eigenform along the p-tower.

Construction pipeline, in the order the code runs it:

  1. AdaptedSplitting conjugates a certified local matrix model at p so the
     embedded CM generator becomes diagonal, with the two p-adic roots of
     its minimal polynomial on the diagonal, and the anticommuting
     involution j becomes [[0, beta], [1, 0]].  Later congruences are
     stated on these fixed matrices, which makes the order and ideal
     constructions below independent of how the initial splitting happened
     to be built, and the diagonal position is what gives the depth-n
     ideals conductor-exact left orders.
  2. The level-Mp order is cut out of the maximal order by one congruence
     (lower-left entry divisible by p) and the depth-n base ideal by three
     more, expressing membership in x_n O_0 where x_n = [[p^n, 1], [0, 1]]
     and O_0 is the Borel order.  Both are certified after construction:
     norms, the right-module property, and conductor-exactness of the
     embedded quadratic order of level p^n inside the left order.
     Consecutive base points are nested, each a U_p child of the previous
     one, which aligns layer labels along the tower.
  3. The ring class group of conductor p^n acts by left multiplication with
     embedded ideals; every class gets one representative ideal built from
     a reduced form prime to the classification primes, with its exact
     norm certified on the spot.
  4. The level-M eigenvector is stabilized to a U_p eigenvector with unit
     eigenvalue alpha; each labeled ideal is classified in the level-Mp
     Brandt module and paired against the CM-twisted weight vector.  Every
     transport is split into a power of p times a p-unit and the power is
     divided out exactly; a failed division raises PrecisionExhausted and
     signals an indexing bug, not rounding.
  5. Group algebra elements are projected to the cyclic p-part of each
     layer and consecutive layers are compared under the corestriction
     fold, both before and after the projection.

theta_tilde_direct recomputes the depth-one element through the two
degeneracy maps down to level M, bypassing the stabilized vector and the
level-Mp module; agreement of the two routes is the main internal check.
The symbolic pieces (HeckeRoot, period_constant, interpolation_factor)
carry the interpolation constants exactly and independently of the tower.
"""

from fractions import Fraction
from math import factorial, lcm

from .brandt import (BrandtModule, extract_eigenvalue, lower_saturation,
                     stabilize)
from .cmpoints import (class_group, cm_splitting, form_prime_to, form_push,
                       is_optimal, order_generator, split_cyclic)
from .errors import (BadLevel, BadPrime, IndexingGap, NotSplit,
                     PrecisionExhausted, ValidationError)
from .lattices import integer_kernel
from .padic import CycloElt, hensel_sqrt, hensel_unit_root, inv_mod, kronecker
from .polyrep import SymPoly, pair_k, sym_power_matrix
from .quatalg import (LocalSplitting, QLattice, choose_algebra, ideal_norm,
                      left_order, maximal_order, right_ideal_classes)

__all__ = ["AdaptedSplitting", "ThetaTower", "theta_tilde_direct",
           "ga_star", "ga_mul", "eval_char", "HeckeRoot", "period_constant",
           "interpolation_factor"]


# ----- 2x2 arithmetic mod p^prec -------------------------------------------

def _m2mul(a, b, m):
    return (((a[0][0] * b[0][0] + a[0][1] * b[1][0]) % m,
             (a[0][0] * b[0][1] + a[0][1] * b[1][1]) % m),
            ((a[1][0] * b[0][0] + a[1][1] * b[1][0]) % m,
             (a[1][0] * b[0][1] + a[1][1] * b[1][1]) % m))


def _m2inv(a, m):
    det = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) % m
    di = inv_mod(det, m)
    return ((a[1][1] * di % m, -a[0][1] * di % m),
            (-a[1][0] * di % m, a[0][0] * di % m))


class AdaptedSplitting:
    """Local splitting at p whose frame diagonalizes the CM embedding.

    Conjugates a self-certified LocalSplitting so that matrix_of(cm.theta)
    equals diag(theta_p, theta_p_bar), the two root lifts of the minimal
    polynomial of the embedded generator, and matrix_of(cm.j) equals
    [[0, beta], [1, 0]].  The diagonal position is what makes the standard
    unipotent produce embeddings of conductor exactly p^n later on; the
    companion-matrix frame would double the conductor.  The conjugator rows
    are exact left eigenvectors of the theta matrix (closed form from the
    characteristic polynomial, no iteration), followed by a diagonal
    rescale aligning j; both target identities are asserted at the end.
    Duck-typed like LocalSplitting (order, q, prec, mod, images, matrix_of)
    so Brandt modules accept it unchanged.
    """

    __slots__ = ("order", "q", "prec", "mod", "images", "cm",
                 "theta_p", "theta_p_bar", "j_target")

    def __init__(self, cm, prec):
        base = LocalSplitting(cm.order, cm.p, prec)
        p = cm.p
        m = p ** prec
        t0 = int(cm.alg.trd(cm.theta))
        d = hensel_sqrt(-cm.DK, p, prec)
        inv2 = inv_mod(2, m)
        th = (t0 + d) * inv2 % m
        thb = (t0 - d) * inv2 % m
        A0 = base.matrix_of(cm.theta)
        G1 = None
        for U in (((1, 0), (0, 1)), ((1, 0), (1, 1))):
            A = _m2mul(_m2mul(U, (tuple(A0[0]), tuple(A0[1])), m),
                       _m2inv(U, m), m)
            if A[1][0] % p:
                rows = ((A[1][0], (th - A[0][0]) % m),
                        (A[1][0], (thb - A[0][0]) % m))
            elif A[0][1] % p:
                rows = (((th - A[1][1]) % m, A[0][1]),
                        ((thb - A[1][1]) % m, A[0][1]))
            else:
                continue
            G1 = _m2mul(rows, U, m)
            break
        if G1 is None:
            raise IndexingGap("embedded generator acts as a scalar mod p")
        J1 = _m2mul(_m2mul(G1, base.matrix_of(cm.j), m), _m2inv(G1, m), m)
        if J1[0][0] % m or J1[1][1] % m:
            raise IndexingGap("involution is not antidiagonal in the frame")
        beta = cm.beta % m
        z1 = J1[0][1] * inv_mod(beta, m) % m
        if (z1 * J1[1][0] - 1) % m:
            raise IndexingGap("involution has the wrong norm in the frame")
        G = ((G1[0][0], G1[0][1]), (z1 * G1[1][0] % m, z1 * G1[1][1] % m))
        Gi = _m2inv(G, m)
        self.order = cm.order
        self.q = p
        self.prec = prec
        self.mod = m
        self.cm = cm
        self.theta_p = th
        self.theta_p_bar = thb
        self.j_target = ((0, beta), (1, 0))
        self.images = [
            [list(r) for r in _m2mul(_m2mul(G, base.images[t], m), Gi, m)]
            for t in range(4)]
        got_t = tuple(tuple(r) for r in self.matrix_of(cm.theta))
        got_j = tuple(tuple(r) for r in self.matrix_of(cm.j))
        if got_t != ((th, 0), (0, thb)) or got_j != self.j_target:
            raise IndexingGap("adapted frame failed its defining identities")

    def matrix_of_coords(self, x):
        """2x2 matrix of an element given by integral order coordinates."""
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
        """2x2 matrix of an algebra element with p-integral coordinates."""
        coords = self.order.coords_of(elt)
        mod = self.mod
        x = []
        for c in coords:
            if c.denominator % self.q == 0:
                raise ValueError("element not q-integral for this order")
            x.append(c.numerator * inv_mod(c.denominator, mod) % mod)
        return self.matrix_of_coords(x)


# ----- congruence sublattices ----------------------------------------------

def _congruence_sublattice(order, cols, modulus):
    """{z in order : sum_t coords(z)_t * col_t == 0 mod modulus, each col}.

    Solved over Z by projecting the integer kernel of the stacked system
    (conditions as columns, modulus relations appended) onto the coordinate
    block; the QLattice constructor restores a canonical basis.
    """
    nc = len(cols)
    rows = [[col[t] for col in cols] for t in range(4)]
    rows += [[modulus if i == j else 0 for j in range(nc)] for i in range(nc)]
    ker = integer_kernel(rows)
    latrows = []
    for v in ker:
        if any(v[:4]):
            latrows.append([sum(v[t] * order.mat[t][c] for t in range(4))
                            for c in range(4)])
    return QLattice(order.alg, latrows, order.den)


def _borel_order(max_order, splitting):
    """Index-p suborder: lower-left entry divisible by p in the given frame."""
    p = splitting.q
    col = [splitting.images[t][1][0] % p for t in range(4)]
    R = _congruence_sublattice(max_order, [col], p)
    if max_order.index_over(R) != p:
        raise IndexingGap("level-p order has wrong index")
    return R


def _left_multiply(alg, gens, lat):
    """Lattice generated by g * b over the given generators and a basis."""
    prods = [alg.mult(g, b) for g in gens for b in lat.basis()]
    den = 1
    for x in prods:
        for c in x:
            den = lcm(den, Fraction(c).denominator)
    rows = [[int(Fraction(c) * den) for c in x] for x in prods]
    return QLattice(alg, rows, den)


# ----- the tower ------------------------------------------------------------

class ThetaTower:
    """Theta elements theta_tilde_n, n = 1..depth, and their projections.

    theta_tilde[n] is a dict over the reduced forms of discriminant
    -p^(2n) D_K with integer coefficients mod p^prec; theta[m] for
    m = 0..depth-1 is the projection of theta_tilde[m+1] to the cyclic
    p-part, stored as a coefficient list indexed by the exponent of a fixed
    compatible generator, so the corestriction of theta[m] is literally the
    fold of indices mod p^(m-1).
    """

    def __init__(self, D, M, k, p, DK, depth, prec):
        if M != 1:
            raise BadLevel("theta towers are implemented for level M = 1")
        if depth < 1 or prec < 1:
            raise ValidationError("depth and prec must be positive")
        if k < 2 or k % 2:
            raise ValidationError("weight must be even and at least 2")
        if kronecker(-DK, p) != 1:
            raise BadPrime(f"{p} must split in the CM field")
        self.D, self.M, self.k, self.p, self.DK = D, M, k, p, DK
        self.depth = depth
        self.r = k - 2
        self.prec_out = prec
        # worst exact division is p^(depth r/2); the congruences that carve
        # the depth-n ideals need 2n more digits than they consume
        self.prec = max(prec + depth * self.r // 2 + 1, 2 * depth + 1)
        self.mod = p ** self.prec
        alg = choose_algebra(D)
        self.alg = alg
        O = maximal_order(alg)
        self.order = O
        self.cm = cm_splitting(O, DK, M, p)
        self.sp = AdaptedSplitting(self.cm, self.prec)
        cs = right_ideal_classes(O, D, M, avoid=p)
        self.bm = BrandtModule(cs, k, p, self.prec, splitting=self.sp)
        self.order_p = _borel_order(O, self.sp)
        cs_p = right_ideal_classes(self.order_p, D, M * p, avoid=p)
        self.bm_p = BrandtModule(cs_p, k, p, self.prec, splitting=self.sp)
        cols = self.bm.invariant_basis()
        if len(cols) != 1:
            raise NotSplit("level-M invariant space is not one-dimensional")
        self.phi = cols[0]
        self.a_p = extract_eigenvalue(self.bm.hecke_matrix(p), self.phi,
                                      p, self.prec)
        self.alpha = hensel_unit_root(self.a_p, p, k, self.prec).val
        self.sharp = stabilize(self.bm_p, self.bm, self.phi, self.alpha)
        self._pair_vector()
        self.G = {}
        self.layers = {}
        self.theta_tilde = {}
        for n in range(1, depth + 1):
            Gn = class_group(DK, p, n)
            self.G[n] = Gn
            self.layers[n] = self._layer_points(n, Gn)
            self.theta_tilde[n] = self._evaluate_layer(n, self.layers[n])
        self._project()

    # -- frame constants

    def _pair_vector(self):
        # in the diagonalizing frame the period polynomial is the bare
        # middle monomial (XY)^(r/2); its p-power and DK-power scalars are
        # tracked separately by the valuation bookkeeping
        mid = self.r // 2
        coeffs = [1 if i == mid else 0 for i in range(self.r + 1)]
        self._wpoly = SymPoly(coeffs, self.k, self.mod)

    # -- layer geometry

    def _base_ideal(self, n):
        """Depth-n base point: elements whose frame image lies in x_n O_0.

        x_n = [[p^n, 1], [0, 1]] in the diagonalizing frame.  Conjugation
        by x_n sends diag(u, v) to [[u, (u - v)/p^n], [0, v]], so the left
        order meets the CM field in the order of conductor exactly p^n;
        and x_(n+1) = x_n diag(p, 1) makes consecutive base points literal
        U_p children of each other, which is what aligns the layer labels
        across the tower.  Norm, right-module property and conductor
        exactness are certified before the ideal is released.
        """
        p = self.p
        pn = p ** n
        imgs = self.sp.images
        cols = [
            [(imgs[t][0][0] - imgs[t][1][0]) % pn for t in range(4)],
            [(imgs[t][0][1] - imgs[t][1][1]) % pn for t in range(4)],
            [p ** (n - 1) * imgs[t][1][0] % pn for t in range(4)],
        ]
        T = _congruence_sublattice(self.order, cols, pn)
        if ideal_norm(self.order_p, T) != pn:
            raise IndexingGap(f"depth-{n} base ideal has wrong norm")
        prod = T.multiply(self.order_p)
        if prod.index_over(T) != 1:
            raise IndexingGap(f"depth-{n} base ideal is not a right module")
        disc_n = -self.DK * pn * pn
        tn, _ = order_generator(disc_n)
        y = tuple((Fraction(tn) * e + pn * wc) / 2
                  for e, wc in zip((1, 0, 0, 0), self.cm.w))
        L = left_order(T, Fraction(pn))
        if not L.contains(y) or not is_optimal(L, y, disc_n, p):
            raise IndexingGap(f"depth-{n} embedding is not conductor-exact")
        return T

    def _layer_points(self, n, Gn):
        """One ideal representative per layer-n point, keyed by its form.

        Each class of the conductor-p^n ring class group is represented by
        a single left multiplication of the base ideal with an embedded
        ideal whose norm is prime to the classification primes.  The layer
        summand does not depend on the choice of representative (the
        normalized diagonal action of an embedded scalar is trivial on the
        middle monomial), so no orbit walk is needed and every norm stays
        bounded by the reduction theory of binary forms.
        """
        T0 = self._base_ideal(n)
        pn = Fraction(self.p ** n)
        bad = (2 * self.D * self.M * self.p
               * self.bm.cs.q0 * self.bm_p.cs.q0)
        ident = Gn.identity()
        pts = {ident: (T0, pn)}
        for f in Gn.forms:
            if f == ident:
                continue
            fp = form_prime_to(f, bad, Gn.disc)
            gg = self.cm.ideal_gens(fp, n)
            X = _left_multiply(self.alg, gg, T0)
            nX = ideal_norm(self.order_p, X)
            if nX != fp[0] * pn:
                raise IndexingGap("embedded ideal changed the norm it promised")
            pts[f] = (X, nX)
        if len(pts) != len(Gn):
            raise IndexingGap("layer points do not exhaust the class group")
        return pts

    # -- evaluation

    def _block(self, gamma, nr):
        """(Sym^r image, p-valuation, unit part mod p^prec) of a transporter."""
        den = 1
        for c in gamma:
            den = lcm(den, Fraction(c).denominator)
        if den % self.p == 0:
            raise IndexingGap("transporter denominator meets p")
        gc = tuple(Fraction(c) * den for c in gamma)
        num = nr * den * den
        if num.denominator != 1:
            raise IndexingGap("transporter norm not integral after clearing")
        num = int(num)
        v = 0
        while num % self.p == 0:
            num //= self.p
            v += 1
        g2 = self.sp.matrix_of(gc)
        raw = sym_power_matrix((tuple(g2[0]), tuple(g2[1])), self.r, self.mod)
        return raw, v, num % self.mod

    def _pair_down(self, raw, vec, u, v, depth_shift, n):
        """Pair the weight vector against raw*vec and divide out p exactly.

        depth_shift is the extra p^(r/2) power the term carries (0 for the
        first degeneracy, 1 for the second); returns the coefficient still
        missing its alpha power, mod p^(prec - e).
        """
        p, m, r = self.p, self.mod, self.r
        blk = r + 1
        val = [sum(raw[a][c] * vec[c] for c in range(blk)) % m
               for a in range(blk)]
        pairing = pair_k(self._wpoly, SymPoly(val, self.k, m), p, self.prec)
        Y = (pairing * pow(self.DK % m, r // 2, m)
             * pow(inv_mod(u, m), r // 2, m)) % m
        e = (v - n - depth_shift) * r // 2
        if e < 0:
            raise IndexingGap("transporter valuation below the layer depth")
        pe = p ** e
        if Y % pe:
            raise PrecisionExhausted("theta coefficient is not p-integral")
        if m // pe < p ** self.prec_out:
            raise PrecisionExhausted("working precision exhausted by division")
        return Y // pe, m // pe

    def _evaluate_layer(self, n, pts):
        p, m = self.p, self.mod
        blk = self.r + 1
        ainv = inv_mod(self.alpha, m)
        out = {}
        for f, (T, nT) in pts.items():
            j, g = self.bm_p.class_of(T, nT)
            raw, v, u = self._block(g, nT / self.bm_p.cs.nrds[j])
            vec = self.sharp[j * blk:(j + 1) * blk]
            c, mred = self._pair_down(raw, vec, u, v, 0, n)
            out[f] = c * pow(ainv, n, mred) % p ** self.prec_out
        return out

    # -- projection to the cyclic p-part

    def _project(self):
        p = self.p
        mo = p ** self.prec_out
        split = {n: split_cyclic(self.G[n], p)
                 for n in range(1, self.depth + 1)}
        self.p_parts = {n: split[n][0] for n in split}
        pgen = {}
        top = self.depth
        size = p ** (top - 1)
        if size == 1:
            pgen[top] = self.G[top].identity()
        else:
            pgen[top] = next(f for f in self.p_parts[top]
                             if self.G[top].element_order(f) == size)
        for n in range(top - 1, 0, -1):
            g = form_push(pgen[n + 1], self.G[n + 1].disc, self.G[n].disc)
            if self.G[n].element_order(g) != p ** (n - 1):
                raise IndexingGap("pushed generator has the wrong order")
            pgen[n] = g
        self.pgen = pgen
        self.theta = {}
        for n in range(1, self.depth + 1):
            pm = p ** (n - 1)
            proj = split[n][2]
            dlog = {}
            acc = self.G[n].identity()
            for e in range(pm):
                dlog[acc] = e
                acc = self.G[n].mul(acc, pgen[n])
            if acc != self.G[n].identity():
                raise IndexingGap("p-part generator does not close its cycle")
            coeffs = [0] * pm
            for f, c in self.theta_tilde[n].items():
                coeffs[dlog[proj(f)]] += c
            self.theta[n - 1] = [x % mo for x in coeffs]

    # -- compatibility checks

    def corestriction_checks(self):
        """Fold of theta[m] along exponents mod p^(m-1) against theta[m-1]."""
        mo = self.p ** self.prec_out
        out = []
        for mup in range(1, self.depth):
            src, dst = self.theta[mup], self.theta[mup - 1]
            fold = [0] * len(dst)
            for e, c in enumerate(src):
                fold[e % len(dst)] = (fold[e % len(dst)] + c) % mo
            out.append(fold == list(dst))
        return out

    def corestriction_checks_tilde(self):
        """Fold of theta_tilde[n] along the ideal-extension map, per layer."""
        mo = self.p ** self.prec_out
        out = []
        for n in range(2, self.depth + 1):
            dn, dn1 = self.G[n].disc, self.G[n - 1].disc
            fold = {}
            for f, c in self.theta_tilde[n].items():
                f2 = form_push(f, dn, dn1)
                fold[f2] = (fold.get(f2, 0) + c) % mo
            prev = self.theta_tilde[n - 1]
            ok = set(fold) == set(prev) and all(
                (fold[f] - c) % mo == 0 for f, c in prev.items())
            out.append(ok)
        return out

    def lelement(self, mlev):
        """theta[m] times its involution: the level-m square in the group algebra."""
        mo = self.p ** self.prec_out
        t = self.theta[mlev]
        return ga_mul(t, ga_star(t), mo)


def theta_tilde_direct(tower, n=1):
    """Depth-n theta element through the two degeneracy maps to level M.

    Evaluates phi at J * O and at the lower saturation of J for every
    labeled point J, combining them with the same alpha regularization the
    stabilized route bakes into its eigenvector.  Costs one classification
    per point per map, so it is only sensible for small n.
    """
    bm = tower.bm
    O = bm.cs.order
    p, m = tower.p, tower.mod
    blk = tower.r + 1
    ainv = inv_mod(tower.alpha, m)
    phi_blocks = [tower.phi[j * blk:(j + 1) * blk]
                  for j in range(len(bm.cs))]
    out = {}
    for f, (T, nT) in tower.layers[n].items():
        X1 = T.multiply(O)
        n1 = ideal_norm(O, X1)
        j1, g1 = bm.class_of(X1, n1)
        raw1, v1, u1 = tower._block(g1, n1 / bm.cs.nrds[j1])
        c1, m1 = tower._pair_down(raw1, phi_blocks[j1], u1, v1, 0, n)
        X2 = lower_saturation(T, O)
        n2 = ideal_norm(O, X2)
        if n2 != n1 * p:
            raise IndexingGap("lower saturation has unexpected norm")
        j2, g2 = bm.class_of(X2, n2)
        raw2, v2, u2 = tower._block(g2, n2 / bm.cs.nrds[j2])
        c2, m2 = tower._pair_down(raw2, phi_blocks[j2], u2, v2, 1, n)
        mred = min(m1, m2)
        c = (c1 - ainv * c2) * pow(ainv, n, mred) % mred
        out[f] = c % p ** tower.prec_out
    return out


# ----- cyclic group algebra helpers -----------------------------------------

def ga_star(a):
    """Involution sending each group element to its inverse."""
    return [a[(-e) % len(a)] for e in range(len(a))]


def ga_mul(a, b, mod):
    """Convolution product on exponent-indexed cyclic group algebras."""
    if len(a) != len(b):
        raise ValueError("group algebra sizes differ")
    npts = len(a)
    out = [0] * npts
    for i, x in enumerate(a):
        if x % mod == 0:
            continue
        for j, y in enumerate(b):
            if y:
                t = (i + j) % npts
                out[t] = (out[t] + x * y) % mod
    return out


def eval_char(coeffs, j, p, prec):
    """Character value of an exponent-indexed element, as a CycloElt.

    coeffs must have length p^m; the character sends the generator behind
    index 1 to zeta^j for a fixed primitive p^m-th root of unity zeta.
    """
    pm = len(coeffs)
    mlev = 0
    while p ** mlev < pm:
        mlev += 1
    if p ** mlev != pm:
        raise ValueError("coefficient list length is not a power of p")
    raw = [0] * CycloElt.degree(p, mlev)
    for e, c in enumerate(coeffs):
        if c:
            CycloElt._accumulate(raw, j * e, c, p, mlev)
    return CycloElt(raw, p, mlev, prec)


# ----- symbolic interpolation data ------------------------------------------

class HeckeRoot:
    """x + y alpha in Q(alpha), alpha a root of X^2 - a_p X + p^(k-1).

    Exact field arithmetic: the inverse goes through the conjugate
    x + y a_p - y alpha and the rational norm x^2 + a_p x y + p^(k-1) y^2.
    """

    __slots__ = ("x", "y", "ap", "pk")

    def __init__(self, x, y, ap, pk):
        self.x = Fraction(x)
        self.y = Fraction(y)
        self.ap = ap
        self.pk = pk

    @classmethod
    def root(cls, ap, k, p):
        return cls(0, 1, ap, p ** (k - 1))

    def _wrap(self, other):
        if isinstance(other, HeckeRoot):
            if (other.ap, other.pk) != (self.ap, self.pk):
                raise ValueError("mixed Hecke root fields")
            return other
        return HeckeRoot(other, 0, self.ap, self.pk)

    def __add__(self, other):
        o = self._wrap(other)
        return HeckeRoot(self.x + o.x, self.y + o.y, self.ap, self.pk)

    def __sub__(self, other):
        o = self._wrap(other)
        return HeckeRoot(self.x - o.x, self.y - o.y, self.ap, self.pk)

    def __rsub__(self, other):
        return self._wrap(other) - self

    def __mul__(self, other):
        o = self._wrap(other)
        return HeckeRoot(self.x * o.x - self.y * o.y * self.pk,
                         self.x * o.y + self.y * o.x + self.y * o.y * self.ap,
                         self.ap, self.pk)

    __radd__ = __add__
    __rmul__ = __mul__

    def conj(self):
        return HeckeRoot(self.x + self.y * self.ap, -self.y, self.ap, self.pk)

    def norm(self):
        return (self.x * self.x + self.ap * self.x * self.y
                + self.pk * self.y * self.y)

    def inv(self):
        c = self.conj()
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("zero element of the Hecke root field")
        return HeckeRoot(c.x / n, c.y / n, self.ap, self.pk)

    def __pow__(self, e):
        if e < 0:
            return self.inv() ** (-e)
        acc = HeckeRoot(1, 0, self.ap, self.pk)
        base = self
        while e:
            if e & 1:
                acc = acc * base
            base = base * base
            e >>= 1
        return acc

    def __eq__(self, other):
        if not isinstance(other, HeckeRoot):
            other = self._wrap(other)
        return ((self.x, self.y, self.ap, self.pk)
                == (other.x, other.y, other.ap, other.pk))

    def __hash__(self):
        return hash((self.x, self.y, self.ap, self.pk))

    def __repr__(self):
        return f"({self.x} + {self.y} a)"


def period_constant(n, k, p, DK, ap, unit_index=1):
    """Constant tying the depth-n square to the central L-value.

    Returns (c, DK) standing for c * sqrt(DK), with
    c = unit_index^2 * (k/2 - 1)!^2 * DK^(k-2) * p^(n(k-1)) / ap^(2n).
    """
    g = factorial(k // 2 - 1)
    c = (Fraction(unit_index ** 2) * g * g * DK ** (k - 2)
         * p ** (n * (k - 1)) / Fraction(ap) ** (2 * n))
    return c, DK


def interpolation_factor(n, k, p, ap, frobenius, chi_pm=(1, 1)):
    """Euler-type factor at p of the depth-n specialization.

    Trivial for n >= 1, where the character is ramified at p.  At n = 0:
    1 - p^(k-2) alpha^(-2) when p is inert, and the product over the two
    primes above p of 1 - chi(prime) p^((k-2)/2) alpha^(-1) when p splits
    (chi values passed as rationals, trivial character by default).
    """
    if n < 0:
        raise ValueError("specialization depth must be nonnegative")
    a = HeckeRoot.root(ap, k, p)
    one = HeckeRoot(1, 0, a.ap, a.pk)
    if n >= 1:
        return one
    if frobenius == "inert":
        return one - a.inv() ** 2 * p ** (k - 2)
    if frobenius == "split":
        s = p ** ((k - 2) // 2)
        return ((one - a.inv() * (Fraction(chi_pm[0]) * s))
                * (one - a.inv() * (Fraction(chi_pm[1]) * s)))
    raise ValueError("frobenius must be 'split' or 'inert'")
