"""Brandt modules: weight-k Hecke action on definite quaternion ideal classes.

A vector is a stack of per-class coefficient blocks mod p^prec. Operators are
assembled from ideal-theoretic transports gamma (J = gamma * I_j) acted on
through one of three coefficient models:

  trivial  k = 2, one-dimensional blocks;
  padic    L_{k-2} through a local splitting at p (needs p coprime to D);
  adjoint  k = 4 only: conjugation on trace-zero quaternions, assembled over
           exact rationals and reduced, so it works even when p divides D.

Only the restriction to the unit-invariant subspace is canonical (transports
are chosen one per neighbor), so eigen computations go through
invariant_basis/restrict. Transports whose norm has p-valuation v carry a
uniform p^(v r/2) rescaling; Hecke/degeneracy assembly picks compensating
scalars so every stored matrix is integral with no headroom bookkeeping.
"""
from fractions import Fraction

from .errors import (BadPrime, IndexingGap, MissingEigenvalue,
                     NonInvertibleWeight, NotSplit, SingularMatrix,
                     ValidationError)
from .lattices import integer_kernel
from .modmat import (mat_inv, mat_mul, mat_vec, nullspace_mod_p,
                     nullspace_prime_power, rank_mod_p, zeros)
from .padic import inv_mod, primes_up_to
from .polyrep import pairing_gram, sym_power_matrix
from .quatalg import (LocalSplitting, QLattice, _fingerprint, ideal_norm,
                      maximal_order, qneighbors, radical_ideal, transporter)

__all__ = ["BrandtModule", "EigenSystem", "eigenforms", "stabilization_maps",
           "up_matrix", "stabilize", "eigenvalue_candidates",
           "hensel_eigenpair", "extract_eigenvalue", "local_generator"]


def local_generator(lat: QLattice, nrd, q: int, smax: int = 200):
    """Element x0 of lat with nrd(x0)/nrd prime to q (local generator at q)."""
    s = 1
    while s <= smax:
        if s % q:
            for v in lat.elements_of_norm(nrd * s):
                return v
        s += 1
    raise ArithmeticError(f"no local generator prime to {q}")


def _frac_mod(x: Fraction, m: int) -> int:
    return x.numerator % m * inv_mod(x.denominator % m, m) % m


class BrandtModule:

    def __init__(self, cs, k: int, p: int, prec: int, splitting=None):
        if k < 2 or k % 2:
            raise NonInvertibleWeight(f"weight {k} must be even and >= 2")
        self.cs = cs
        self.k = k
        self.r = k - 2
        self.p = p
        self.prec = prec
        self.mod = p ** prec
        self.blk = k - 1
        self.dim = len(cs) * self.blk
        if k == 2:
            self.model = "trivial"
        elif cs.D % p == 0:
            if k != 4:
                raise BadPrime("p divides D: only the weight-4 adjoint "
                               "model is available")
            self.model = "adjoint"
        else:
            if p <= self.r:
                raise BadPrime(f"p = {p} must exceed k - 2 = {self.r}")
            self.model = "padic"
        self.splitting = splitting
        if self.model == "padic" and splitting is None:
            # an order that is non-maximal at p has no p-adic matrix units;
            # fall back to the (deterministic) maximal overorder
            base = maximal_order(cs.alg) if cs.M % p == 0 else cs.order
            self.splitting = LocalSplitting(base, p, prec)
        if self.model == "adjoint":
            self._tz = self._trace_zero_basis()
        self._sp_at = {}
        self._fps = [_fingerprint(I, n)
                     for I, n in zip(cs.ideals, cs.nrds)]
        self._ops = {}

    # ----- coefficient models -------------------------------------------

    def _trace_zero_basis(self):
        O = self.cs.order
        trds = [[2 * row[0]] for row in O.mat]
        ker = integer_kernel(trds)
        assert len(ker) == 3
        out = []
        for v in ker:
            w = [sum(v[t] * O.mat[t][c] for t in range(4)) for c in range(4)]
            out.append(tuple(Fraction(x, O.den) for x in w))
        return out

    def _tz_coords_gauss(self, y):
        aug = [[self._tz[s][c] for s in range(3)] + [Fraction(y[c])]
               for c in range(4)]
        pr = 0
        piv_cols = []
        for s in range(3):
            row = next(i for i in range(pr, 4) if aug[i][s] != 0)
            aug[pr], aug[row] = aug[row], aug[pr]
            sc = aug[pr][s]
            aug[pr] = [x / sc for x in aug[pr]]
            for i in range(4):
                if i != pr and aug[i][s] != 0:
                    f = aug[i][s]
                    aug[i] = [a - f * b for a, b in zip(aug[i], aug[pr])]
            piv_cols.append(s)
            pr += 1
        assert all(x == 0 for x in aug[3]), "element not in trace-zero span"
        return [aug[s][3] for s in range(3)]

    def _adjoint_matrix(self, gamma, nrd_gamma):
        alg = self.cs.alg
        gbar = alg.conj(gamma)
        cols = []
        for b in self._tz:
            yv = alg.mult(alg.mult(gamma, b), gbar)
            yv = tuple(Fraction(x) / nrd_gamma for x in yv)
            cols.append(self._tz_coords_gauss(yv))
        return [[cols[t][s] for t in range(3)] for s in range(3)]

    def _transport_matrix(self, gamma, nrd_gamma):
        """(p^(v r/2) rho(gamma) mod p^prec, v) for v = val_p(nrd gamma)."""
        nrd_gamma = Fraction(nrd_gamma)
        num, den = nrd_gamma.numerator, nrd_gamma.denominator
        if den % self.p == 0:
            raise ArithmeticError("transport norm has p in denominator")
        v = 0
        while num % self.p == 0:
            num //= self.p
            v += 1
        if v > 1:
            raise ArithmeticError("transport norm has p-valuation > 1")
        m = self.mod
        if self.model == "trivial":
            return [[1]], v
        if self.model == "adjoint":
            mat = self._adjoint_matrix(gamma, nrd_gamma)
            pv = self.p ** v
            return [[_frac_mod(x * pv, m) for x in row] for row in mat], v
        g = self.splitting.matrix_of(gamma)
        u = num % m * inv_mod(den % m, m) % m
        sc = pow(inv_mod(u, m), self.r // 2, m)
        mat = sym_power_matrix(g, self.r, m)
        return [[x * sc % m for x in row] for row in mat], v

    def _hecke_scale(self, q, v):
        # completes the q^(r/2) Hecke normalization given the absorbed shift
        if v == 0:
            return pow(q, self.r // 2, self.mod)
        if q != self.p:
            raise ArithmeticError("p-valuation on a transport away from p")
        return 1

    # ----- ideal bookkeeping --------------------------------------------

    def _splitting_at(self, q):
        if q == self.p and self.model == "padic":
            return self.splitting
        if q not in self._sp_at:
            self._sp_at[q] = LocalSplitting(self.cs.order, q, 1)
        return self._sp_at[q]

    def class_of(self, J, nrd_J):
        """(index j, gamma) with gamma * ideals[j] == J."""
        fp = _fingerprint(J, nrd_J)
        for j in range(len(self.cs)):
            if self._fps[j] != fp:
                continue
            g = transporter(J, self.cs.ideals[j], nrd_J, self.cs.nrds[j])
            if g is not None:
                return j, g
        raise IndexingGap("ideal matches no class representative")

    def _add_block(self, big, i, j, mat, scale=1):
        b, m = self.blk, self.mod
        for a in range(b):
            row = big[i * b + a]
            for c in range(b):
                row[j * b + c] = (row[j * b + c] + scale * mat[a][c]) % m

    # ----- operators ------------------------------------------------------

    def hecke_matrix(self, q: int):
        """T_q (or U_p when q = p on a level-p class set), q coprime to D*M."""
        if q in self._ops:
            return self._ops[q]
        if self.cs.D % q == 0 or self.cs.M % q == 0:
            raise ValueError("q divides the discriminant or level; "
                             "use atkin_lehner for q | D")
        sp = self._splitting_at(q)
        T = zeros(self.dim)
        for i in range(len(self.cs)):
            for J, nJ in qneighbors(self.cs.order, sp, self.cs.ideals[i],
                                    self.cs.nrds[i]):
                j, g = self.class_of(J, nJ)
                mat, v = self._transport_matrix(g, nJ / self.cs.nrds[j])
                self._add_block(T, i, j, mat, self._hecke_scale(q, v))
        self._ops[q] = T
        return T

    def atkin_lehner(self, q: int):
        """U_q for q | D, through the radical ideal transport."""
        if self.cs.D % q:
            raise ValueError(f"{q} does not divide D = {self.cs.D}")
        P = radical_ideal(self.cs.order, q)
        T = zeros(self.dim)
        for i in range(len(self.cs)):
            X = self.cs.ideals[i].multiply(P)
            nX = self.cs.nrds[i] * q
            j, g = self.class_of(X, nX)
            mat, v = self._transport_matrix(g, nX / self.cs.nrds[j])
            self._add_block(T, i, j, mat, self._hecke_scale(q, v))
        return T

    def unit_transports(self, i):
        return [self._transport_matrix(u, Fraction(1))[0]
                for u in self.cs.units[i]]

    def projector(self):
        """Block-diagonal averaging over left unit groups."""
        P = zeros(self.dim)
        for i in range(len(self.cs)):
            n_u = len(self.cs.units[i])
            if n_u % self.p == 0:
                raise NonInvertibleWeight(
                    f"p = {self.p} divides a unit group order {n_u}")
            sc = inv_mod(n_u, self.mod)
            acc = zeros(self.blk)
            for mat in self.unit_transports(i):
                for a in range(self.blk):
                    for c in range(self.blk):
                        acc[a][c] = (acc[a][c] + mat[a][c]) % self.mod
            self._add_block(P, i, i, acc, sc)
        return P

    def invariant_basis(self):
        """Columns spanning the unit-invariant subspace mod p^prec."""
        cols = []
        for i in range(len(self.cs)):
            rows = []
            for mat in self.unit_transports(i):
                for a in range(self.blk):
                    row = list(mat[a])
                    row[a] = (row[a] - 1) % self.mod
                    rows.append(row)
            ker = nullspace_prime_power(rows, self.p, self.prec)
            kbar = nullspace_mod_p(rows, self.p)
            if len(ker) != len(kbar):
                raise SingularMatrix("invariant subspace failed to lift")
            for v in ker:
                col = [0] * self.dim
                for a in range(self.blk):
                    col[i * self.blk + a] = v[a]
                cols.append(col)
        return cols

    def restrict(self, op, basis):
        """Matrix of op on the span of basis columns; asserts stability."""
        n, w = self.dim, len(basis)
        B = [[basis[t][a] for t in range(w)] for a in range(n)]
        TB = [[sum(op[a][c] * B[c][t] for c in range(n)) % self.mod
               for t in range(w)] for a in range(n)]
        piv = _pivot_rows(B, self.p, w)
        Bp = [[B[a][t] for t in range(w)] for a in piv]
        TBp = [[TB[a][t] for t in range(w)] for a in piv]
        A = mat_mul(mat_inv(Bp, self.p, self.prec), TBp, self.mod)
        BA = [[sum(B[a][s] * A[s][t] for s in range(w)) % self.mod
               for t in range(w)] for a in range(n)]
        if BA != TB:
            raise IndexingGap("operator does not preserve the subspace")
        return A

    def atkin_lehner_full(self):
        """Transport by the product of radicals over q | D (the involution)."""
        from .padic import prime_factors
        M_D = None
        for q in prime_factors(self.cs.D):
            P = radical_ideal(self.cs.order, q)
            M_D = P if M_D is None else M_D.multiply(P)
        return M_D

    def petersson_gram(self):
        """Unit-weighted pairing matrix twisted by the Atkin-Lehner ideal."""
        m = self.mod
        if self.model == "adjoint":
            alg = self.cs.alg
            Gk = [[_frac_mod(Fraction(alg.trd(alg.mult(
                self._tz[s], alg.conj(self._tz[t])))), m)
                for t in range(3)] for s in range(3)]
        elif self.model == "trivial":
            Gk = [[1]]
        else:
            Gk = pairing_gram(self.k, self.p, self.prec)
        M_D = self.atkin_lehner_full()
        nM = ideal_norm(self.cs.order, M_D)
        G = zeros(self.dim)
        shifts = set()
        for i in range(len(self.cs)):
            X = self.cs.ideals[i].multiply(M_D)
            j, g = self.class_of(X, self.cs.nrds[i] * nM)
            mat, v = self._transport_matrix(
                g, self.cs.nrds[i] * nM / self.cs.nrds[j])
            # when p | D the twist norm picks up one uniform factor of p;
            # a global scalar is harmless for adjointness statements
            shifts.add(v)
            blk = mat_mul(Gk, mat, m)
            sc = inv_mod(len(self.cs.units[i]), m)
            self._add_block(G, i, j, blk, sc)
        if len(shifts) != 1:
            raise ArithmeticError("inconsistent p-valuations in the twist")
        return G


def _pivot_rows(B, p, w):
    n = len(B)
    work = [[B[a][t] % p for t in range(w)] for a in range(n)]
    piv = []
    done = 0
    for a in range(n):
        col = next((t for t in range(w) if work[a][t] % p), None)
        if col is None:
            continue
        sc = inv_mod(work[a][col], p)
        work[a] = [x * sc % p for x in work[a]]
        for a2 in range(n):
            if a2 != a and work[a2][col] % p:
                f = work[a2][col]
                work[a2] = [(x - f * y) % p for x, y in zip(work[a2], work[a])]
        piv.append(a)
        done += 1
        if done == w:
            return piv
    raise SingularMatrix("basis not of full rank mod p")


# ----- p-stabilization ----------------------------------------------------

def lower_saturation(J: QLattice, max_order: QLattice):
    """Largest right module of max_order inside J: {x in J : x*O in J}."""
    alg = J.alg
    out = J
    for t in range(4):
        b = tuple(Fraction(x, max_order.den) for x in max_order.mat[t])
        n = alg.nrd(b)
        binv = tuple(Fraction(c) / n for c in alg.conj(b))
        rows = []
        for row in J.mat:
            x = tuple(Fraction(c, J.den) for c in row)
            prod = alg.mult(x, binv)
            rows.append(prod)
        den = 1
        for pr in rows:
            for c in pr:
                den = den * c.denominator // _gcd(den, c.denominator)
        imat = [[int(c * den) for c in pr] for pr in rows]
        out = out.intersect(QLattice(alg, imat, den))
    return out


def _gcd(a, b):
    from math import gcd
    return gcd(a, b)


def stabilization_maps(bm_p: BrandtModule, bm: BrandtModule):
    """(iota1, iota2s): degeneracy maps from bm level M to bm_p level M*p.

    iota1 transports at the saturation J*O; iota2s is p^(r/2) times the
    transport at the lower saturation {x in J : x*O in J}, so both matrices
    are integral and U_p iota1 = iota1 T_p - iota2s,
    U_p iota2s = p^(k-1) iota1 hold exactly.
    """
    O = bm.cs.order
    p = bm.p
    i1 = [[0] * bm.dim for _ in range(bm_p.dim)]
    i2 = [[0] * bm.dim for _ in range(bm_p.dim)]
    for i in range(len(bm_p.cs)):
        J = bm_p.cs.ideals[i]
        L = J.multiply(O)
        nL = ideal_norm(O, L)
        j, g = bm.class_of(L, nL)
        mat, v = bm._transport_matrix(g, nL / bm.cs.nrds[j])
        if v:
            raise ArithmeticError("saturation transport should be a p-unit")
        _add_rect(i1, i, j, mat, bm.blk, bm.mod)
        Jl = lower_saturation(J, O)
        nJl = ideal_norm(O, Jl)
        if nJl != nL * p:
            raise IndexingGap("lower saturation has unexpected norm")
        j2, g2 = bm.class_of(Jl, nJl)
        mat2, v2 = bm._transport_matrix(g2, nJl / bm.cs.nrds[j2])
        if v2 != 1:
            raise ArithmeticError("lower transport should have p-valuation 1")
        _add_rect(i2, i, j2, mat2, bm.blk, bm.mod)
    return i1, i2


def _add_rect(big, i, j, mat, blk, m):
    for a in range(blk):
        row = big[i * blk + a]
        for c in range(blk):
            row[j * blk + c] = (row[j * blk + c] + mat[a][c]) % m


def up_matrix(bm_p: BrandtModule):
    """U_p on a level-M*p module, p^(r/2)-normalized like hecke_matrix.

    The p digit sublattices of each class ideal J are cut out line by line:
    among the p+1 column-condition kernels exactly one (the direction fixed
    by the Eichler order) has dimension 3 and is skipped.
    """
    p = bm_p.p
    R = bm_p.cs.order
    sp = bm_p.splitting
    imgs = []
    for t in range(4):
        b = tuple(Fraction(x, R.den) for x in R.mat[t])
        imgs.append(sp.matrix_of(b))
    U = zeros(bm_p.dim)
    for i in range(len(bm_p.cs)):
        J = bm_p.cs.ideals[i]
        nJ = bm_p.cs.nrds[i]
        x0 = local_generator(J, nJ, p)
        lines = [(1, t) for t in range(p)] + [(0, 1)]
        n_special = n_digit = 0
        for c1, c2 in lines:
            conds = []
            for colj in range(2):
                conds.append([(imgs[t][0][colj] * c2
                               - imgs[t][1][colj] * c1) % p
                              for t in range(4)])
            ker = nullspace_mod_p(conds, p)
            if len(ker) == 3:
                n_special += 1
                continue
            assert len(ker) == 2, "digit kernel of unexpected dimension"
            n_digit += 1
            rows = []
            for vv in ker:
                w = [sum(vv[t] * R.mat[t][c] for t in range(4))
                     for c in range(4)]
                elt = tuple(Fraction(x, R.den) for x in w)
                prod = bm_p.cs.alg.mult(x0, elt)
                sc = [Fraction(x) * J.den * R.den for x in prod]
                assert all(f.denominator == 1 for f in sc)
                rows.append([int(f) for f in sc])
            for rr in J.mat:
                rows.append([p * x * R.den for x in rr])
            Jd = QLattice(bm_p.cs.alg, rows, J.den * R.den)
            j, g = bm_p.class_of(Jd, nJ * p)
            mat, v = bm_p._transport_matrix(g, nJ * p / bm_p.cs.nrds[j])
            if v != 1:
                raise ArithmeticError("digit transport should have "
                                      "p-valuation 1")
            _add_rect(U, i, j, mat, bm_p.blk, bm_p.mod)
        if n_special != 1 or n_digit != p:
            raise IndexingGap("digit line count failed")
    return U


def stabilize(bm_p: BrandtModule, bm: BrandtModule, phi, alpha: int):
    """phi_sharp = iota1 phi - alpha^{-1} iota2s phi, a U_p eigenvector."""
    i1, i2 = stabilization_maps(bm_p, bm)
    m = bm.mod
    ainv = inv_mod(alpha % m, m)
    v1 = [sum(row[t] * phi[t] for t in range(bm.dim)) % m for row in i1]
    v2 = [sum(row[t] * phi[t] for t in range(bm.dim)) % m for row in i2]
    return [(a - ainv * b) % m for a, b in zip(v1, v2)]


# ----- eigenvector extraction ---------------------------------------------

def eigenvalue_candidates(A, p: int):
    """Eigenvalues of A mod p (residues where A - lam is singular)."""
    w = len(A)
    out = []
    for lam in range(p):
        Am = [[(A[a][c] - (lam if a == c else 0)) % p for c in range(w)]
              for a in range(w)]
        if rank_mod_p(Am, p) < w:
            out.append(lam)
    return out


def hensel_eigenpair(A, lam0: int, p: int, prec: int):
    """Lift a simple mod-p eigenvalue to (vector, eigenvalue) mod p^prec.

    The eigenvector is normalized to 1 at its first unit coordinate; raises
    NotSplit when the eigenvalue is not simple enough for the lift.
    """
    w = len(A)
    m = p ** prec
    Am = [[(A[a][c] - (lam0 if a == c else 0)) % p for c in range(w)]
          for a in range(w)]
    ker = nullspace_mod_p(Am, p)
    if len(ker) != 1:
        raise NotSplit(f"eigenvalue {lam0} mod {p} has kernel "
                       f"dimension {len(ker)}")
    v0 = ker[0]
    i0 = next(t for t in range(w) if v0[t] % p)
    sc = inv_mod(v0[i0], p)
    v0 = [x * sc % p for x in v0]
    free = [t for t in range(w) if t != i0]
    jac = [[Am[a][t] for t in free] + [(-v0[a]) % p] for a in range(w)]
    try:
        jinv = mat_inv(jac, p, 1)
    except SingularMatrix:
        raise NotSplit(f"eigenvalue {lam0} mod {p} is not simple")
    v = [x % m for x in v0]
    lam = lam0
    for j in range(1, prec):
        pj = p ** j
        resid = [(sum(A[a][c] * v[c] for c in range(w)) - lam * v[a]) % m
                 for a in range(w)]
        assert all(x % pj == 0 for x in resid)
        rhs = [(-(x // pj)) % p for x in resid]
        upd = mat_vec(jinv, rhs, p)
        for t, dv in zip(free, upd[:-1]):
            v[t] = (v[t] + pj * dv) % m
        lam = (lam + pj * upd[-1]) % m
    resid = [(sum(A[a][c] * v[c] for c in range(w)) - lam * v[a]) % m
             for a in range(w)]
    assert all(x == 0 for x in resid)
    return v, lam


def extract_eigenvalue(op, vec, p: int, prec: int):
    """op vec = lam vec => lam; MissingEigenvalue if vec is not an eigenvector."""
    m = p ** prec
    n = len(vec)
    i0 = next((t for t in range(n) if vec[t] % p), None)
    if i0 is None:
        raise MissingEigenvalue("vector is divisible by p")
    w = [sum(op[a][c] * vec[c] for c in range(n)) % m for a in range(n)]
    lam = w[i0] * inv_mod(vec[i0], m) % m
    if any((w[a] - lam * vec[a]) % m for a in range(n)):
        raise MissingEigenvalue("vector is not an eigenvector")
    return lam


class EigenSystem:
    """Eigenvalue table of one fixed form: level data plus q -> a_q.

    Entries are exact integers (prec None) or residues mod p^prec (prec a
    (p, prec) pair). Exact entries away from the level must sit inside the
    Ramanujan window a_q^2 <= 4 q^(k-1).
    """

    __slots__ = ("M", "D", "k", "values", "prec")

    def __init__(self, M, D, k, values, prec=None):
        self.M = int(M)
        self.D = int(D)
        self.k = int(k)
        self.values = {int(q): int(a) for q, a in values.items()}
        self.prec = prec
        if prec is None:
            for q, a in self.values.items():
                if (self.D * self.M) % q and a * a > 4 * q ** (self.k - 1):
                    raise ValidationError(
                        f"a_{q} = {a} breaks the Ramanujan bound")

    def a(self, q):
        if q not in self.values:
            raise MissingEigenvalue(f"no eigenvalue stored at {q}")
        return self.values[q]

    def __contains__(self, q):
        return q in self.values


def _restrict_group(A, group, p):
    # matrix of A on the mod-p span of the group's coordinate vectors
    w, d = len(A), len(group)
    B = [[group[t][a] for t in range(d)] for a in range(w)]
    AB = [[sum(A[a][c] * B[c][t] for c in range(w)) % p for t in range(d)]
          for a in range(w)]
    piv = _pivot_rows(B, p, d)
    Bp = [[B[a][t] % p for t in range(d)] for a in piv]
    ABp = [[AB[a][t] for t in range(d)] for a in piv]
    return mat_mul(mat_inv(Bp, p, 1), ABp, p)


def eigenforms(bm: BrandtModule, qmax: int = 13):
    """Simultaneous Hecke eigenvectors on the invariant subspace.

    Splits the unit-invariant subspace by kernels of T_q - lam over F_p for
    q <= qmax away from D*M*p, then Hensel-lifts each line to p^prec and reads
    off one eigenvalue per operator. Returns a list of (EigenSystem, vector)
    with full-space vectors normalized so some coordinate is a unit. NotSplit
    when a line refuses to lift or two systems collide mod p.
    """
    cs, p, prec, m = bm.cs, bm.p, bm.prec, bm.mod
    B = bm.invariant_basis()
    w = len(B)
    if w == 0:
        return []
    qs = [q for q in primes_up_to(qmax) if (cs.D * cs.M * p) % q]
    ops = {q: bm.restrict(bm.hecke_matrix(q), B) for q in qs}
    groups = [[tuple(1 if a == t else 0 for a in range(w)) for t in range(w)]]
    for q in qs:
        nxt = []
        for g in groups:
            if len(g) == 1:
                nxt.append(g)
                continue
            Ag = _restrict_group(ops[q], g, p)
            for lam in eigenvalue_candidates(Ag, p):
                rows = [[(Ag[a][c] - (lam if a == c else 0)) % p
                         for c in range(len(g))] for a in range(len(g))]
                piece = []
                for v in nullspace_mod_p(rows, p):
                    piece.append(tuple(
                        sum(v[s] * g[s][a] for s in range(len(g))) % p
                        for a in range(w)))
                if piece:
                    nxt.append(piece)
        groups = nxt
    out = []
    seen = set()
    for g in groups:
        if len(g) != 1:
            raise NotSplit(f"a {len(g)}-dimensional block survived q <= {qmax}")
        # lift along a combination that separates this line from the others
        vec = lam = None
        for mult in (1, 3, 7, 19):
            comb = [[sum(pow(mult, i, p) * ops[q][a][c]
                         for i, q in enumerate(qs)) % m
                     for c in range(w)] for a in range(w)]
            i0 = next(t for t in range(w) if g[0][t] % p)
            lam0 = sum(comb[i0][c] * g[0][c] for c in range(w)) \
                * inv_mod(g[0][i0], p) % p
            try:
                vec, lam = hensel_eigenpair(comb, lam0, p, prec)
                break
            except NotSplit:
                continue
        if vec is None:
            raise NotSplit("no operator combination separates an eigenline")
        key = tuple(extract_eigenvalue(ops[q], vec, p, 1) % p for q in qs)
        if key in seen:
            raise NotSplit("two eigensystems collide mod p")
        seen.add(key)
        table = {q: extract_eigenvalue(ops[q], vec, p, prec) for q in qs}
        full = [sum(B[t][a] * vec[t] for t in range(w)) % m
                for a in range(bm.dim)]
        out.append((EigenSystem(cs.M, cs.D, bm.k, table, prec=(p, prec)),
                    full))
    return out
