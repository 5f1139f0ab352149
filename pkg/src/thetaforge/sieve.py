"""Admissible primes, parity bookkeeping, level raising, and the symbolic
verifier for the corestriction recursion of regularized class towers.

A prime ell is n-admissible for a weight-k eigenform when it is coprime to
the level and to p, inert in the CM field, generates a group of order prime
to p in both residue directions (p does not divide ell^2 - 1), and the
quantity ell^(k/2) + ell^((k-2)/2) - eps * a_ell is divisible by p^n for at
least one sign eps. Every report emitted by the sieve can be replayed by
`recondition`, which recomputes the four conditions through sympy instead of
the in-house arithmetic.

Raising the level by a product S of admissible primes flips definiteness per
prime factor; `find_congruent_eigenform` runs the search for an eigensystem
on the raised (definite) quaternion algebra congruent to the input away
from S, with prescribed eigenvalues eps * ell^((k-2)/2) at the new primes.

`verify_heegner_compat` checks, purely formally, that the corestriction
recursion on regularized classes follows from the stated Hecke relations.
Class symbols y[0], y[1], ... (conductor p^m at index m) are kept as free
module generators over (Z/p^prec)[s, s^-1], s the Frobenius of one prime
above p in the split case; the conjugate Frobenius is s^-1 since the two
multiply to the trivial Artin symbol. Corestriction is a rewriting system
with one rule per symbol, so confluence is immediate.
"""
import random
from functools import lru_cache

from .brandt import BrandtModule, EigenSystem
from .errors import (MissingEigenvalue, NonZeroResidue, NotDefinite,
                     NotSquareFree, PrecisionExhausted, SingularMatrix,
                     ValidationError)
from .modmat import mat_inv, mat_mul, nullspace_prime_power
from .padic import inv_mod, is_prime, kronecker, prime_factors, primes_up_to
from .quatalg import choose_algebra, maximal_order, right_ideal_classes

__all__ = ["AdmissibleReport", "is_admissible", "recondition", "sieve_range",
           "classify_parity", "brandt_eigen_table", "LevelRaiseReport",
           "find_congruent_eigenform", "FormalHeegnerSystem",
           "CompatCertificate", "verify_heegner_compat", "MUTATIONS"]


# ----- admissible primes ----------------------------------------------------

class AdmissibleReport:
    """Outcome of the four-condition test at one prime.

    signs lists every working (eps, valuation) pair; when both signs reach
    depth n the consumer has to pick, so both are kept. A report with any
    failed condition has empty signs and admissible False.
    """

    __slots__ = ("ell", "n", "coprime_ok", "inert_ok", "tame_ok", "signs")

    def __init__(self, ell, n, coprime_ok, inert_ok, tame_ok, signs):
        self.ell = ell
        self.n = n
        self.coprime_ok = coprime_ok
        self.inert_ok = inert_ok
        self.tame_ok = tame_ok
        self.signs = tuple(signs)

    @property
    def congruence_ok(self):
        return bool(self.signs)

    @property
    def admissible(self):
        return (self.coprime_ok and self.inert_ok and self.tame_ok
                and self.congruence_ok)

    @property
    def eps(self):
        return self.signs[0][0] if self.signs else None

    @property
    def valuation(self):
        return self.signs[0][1] if self.signs else None

    def as_dict(self):
        return {
            "ell": self.ell, "n": self.n, "admissible": self.admissible,
            "coprime_ok": self.coprime_ok, "inert_ok": self.inert_ok,
            "tame_ok": self.tame_ok, "congruence_ok": self.congruence_ok,
            "eps": self.eps, "valuation": self.valuation,
            "signs": [{"eps": e, "valuation": v} for e, v in self.signs],
        }

    def __repr__(self):
        tag = "admissible" if self.admissible else "rejected"
        return f"AdmissibleReport(ell={self.ell}, n={self.n}, {tag})"


def _val(t, p):
    v = 0
    while t % p == 0:
        t //= p
        v += 1
    return v


def is_admissible(ell, n, eigen: EigenSystem, DK: int, p: int, k: int):
    """Four-condition report for ell at depth n.

    The eigenvalue is only consulted once the coprimality, inertness and
    tameness conditions already hold, so rejected primes never raise
    MissingEigenvalue.
    """
    if not is_prime(ell):
        raise ValidationError(f"{ell} is not prime")
    if n < 1:
        raise ValidationError("admissibility depth must be >= 1")
    coprime_ok = (eigen.M * eigen.D * p) % ell != 0
    inert_ok = kronecker(-DK, ell) == -1
    tame_ok = (ell * ell - 1) % p != 0
    signs = []
    if coprime_ok and inert_ok and tame_ok:
        a_ell = eigen.a(ell)
        base = ell ** (k // 2) + ell ** ((k - 2) // 2)
        for eps in (1, -1):
            t = base - eps * a_ell
            # |a_ell| < ell^((k-2)/2) (ell+1) by Ramanujan, so t != 0
            v = _val(t, p)
            if v >= n:
                signs.append((eps, v))
    return AdmissibleReport(ell, n, coprime_ok, inert_ok, tame_ok, signs)


def recondition(report: AdmissibleReport, eigen: EigenSystem, DK: int,
                p: int, k: int) -> bool:
    """Replay all four conditions through sympy; True iff the report agrees.

    Deliberately avoids kronecker/_val/is_admissible above: quadratic residue
    by jacobi_symbol, valuations by multiplicity, divisibility spelled out.
    """
    from sympy import isprime, jacobi_symbol, multiplicity

    ell, n = report.ell, report.n
    if not isprime(ell):
        return False
    c1 = (eigen.M % ell != 0 and eigen.D % ell != 0 and p % ell != 0)
    c2 = jacobi_symbol(-DK, ell) == -1
    c3 = ((ell - 1) % p != 0) and ((ell + 1) % p != 0)
    signs = []
    if c1 and c2 and c3 and ell in eigen:
        for eps in (1, -1):
            t = ell ** (k // 2) + ell ** ((k - 2) // 2) - eps * eigen.a(ell)
            v = int(multiplicity(p, t)) if t % p == 0 else 0
            if v >= n:
                signs.append((eps, v))
    ok = (c1 == report.coprime_ok and c2 == report.inert_ok
          and c3 == report.tame_ok and tuple(signs) == report.signs)
    return ok and report.admissible == (c1 and c2 and c3 and bool(signs))


def sieve_range(eigen: EigenSystem, DK: int, p: int, k: int, n: int,
                lmax: int):
    """Admissible reports for every prime <= lmax, in increasing order.

    Primes rejected by the coprimality, inertness or tameness conditions are
    skipped silently; a prime surviving those with no stored eigenvalue
    raises MissingEigenvalue (the caller promised a table up to lmax).
    """
    out = []
    for ell in primes_up_to(lmax):
        rep = is_admissible(ell, n, eigen, DK, p, k)
        if rep.admissible:
            out.append(rep)
    return out


def brandt_eigen_table(bm: BrandtModule, lmax: int) -> EigenSystem:
    """Exact eigenvalue table of a one-dimensional Brandt eigenspace.

    Requires the invariant subspace to be a single line; each a_ell is read
    off the restricted 1x1 operator and centered, so bm.prec must satisfy
    p^prec > 4 lmax^((k-1)/2) for the lift to be exact. The operators at
    primes dividing D come from the two-sided radical transports, everything
    else from neighbor sums.
    """
    cs = bm.cs
    if bm.mod ** 2 <= 16 * lmax ** (bm.k - 1):
        raise PrecisionExhausted(
            f"p^{bm.prec} cannot pin integers up to 2*sqrt({lmax}^{bm.k - 1})")
    basis = bm.invariant_basis()
    if len(basis) != 1:
        raise ValidationError(
            f"invariant subspace has rank {len(basis)}, need 1")
    table = {}
    for ell in primes_up_to(lmax):
        if cs.D % ell == 0:
            op = bm.atkin_lehner(ell)
        elif cs.M % ell == 0:
            continue
        else:
            op = bm.hecke_matrix(ell)
        lam = bm.restrict(op, basis)[0][0]
        table[ell] = lam if lam <= bm.mod // 2 else lam - bm.mod
    return EigenSystem(cs.M, cs.D, bm.k, table, prec=None)


# ----- parity of the raised quaternion algebra ------------------------------

def classify_parity(D: int, S: int) -> str:
    """definite / indefinite according to the Moebius function of D*S."""
    N = D * S
    if N < 1:
        raise ValidationError("D*S must be a positive integer")
    qs = prime_factors(N)
    for q in qs:
        if N % (q * q) == 0:
            raise NotSquareFree(f"{N} is divisible by {q}^2")
    return "definite" if len(qs) % 2 == 1 else "indefinite"


# ----- level raising --------------------------------------------------------

class LevelRaiseReport:
    """Search outcome on the raised algebra.

    matches lists (sign pattern, residual dimension) for every pattern of
    eps_ell whose joint eigenspace with the congruence conditions is nonzero.
    """

    __slots__ = ("D", "M", "S", "k", "p", "n", "found", "matches",
                 "congruence_primes", "dim")

    def __init__(self, D, M, S, k, p, n, found, matches, congruence_primes,
                 dim):
        self.D = D
        self.M = M
        self.S = S
        self.k = k
        self.p = p
        self.n = n
        self.found = found
        self.matches = matches
        self.congruence_primes = congruence_primes
        self.dim = dim

    def as_dict(self):
        return {
            "D": self.D, "M": self.M, "S": self.S, "k": self.k, "p": self.p,
            "n": self.n, "found": self.found,
            "congruence_primes": list(self.congruence_primes),
            "invariant_dim": self.dim,
            "matches": [{"signs": dict(sg), "dim": d}
                        for sg, d in self.matches],
        }

    def __repr__(self):
        tag = "match" if self.found else "no match"
        return f"LevelRaiseReport(S={self.S}, n={self.n}, {tag})"


def _span_combine(cols, K, m):
    # new columns K[s] expressed in the ambient coordinates of cols
    return [[sum(K[s][a] * cols[a][t] for a in range(len(cols))) % m
             for t in range(len(cols[0]))] for s in range(len(K))]


@lru_cache(maxsize=8)
def _raised_module(D_new, M, k, p, prec):
    order = maximal_order(choose_algebra(D_new))
    cs = right_ideal_classes(order, D_new, M, avoid=p)
    bm = BrandtModule(cs, k, p, prec)
    return bm, tuple(tuple(c) for c in bm.invariant_basis())


def find_congruent_eigenform(target: EigenSystem, S: int, p: int, n: int,
                             qmax: int = 13):
    """Search S_k of the raised algebra for a system congruent to target.

    Congruence away from S means: same T_q eigenvalue mod p^n for the good
    primes q <= qmax, same U_q eigenvalue for q dividing the old
    discriminant. On top of that the new primes ell | S must act through
    eps * ell^((k-2)/2); every sign pattern with a nonzero joint eigenspace
    is reported. NoMatch is a report with found False, not an exception.
    """
    if S == 1:
        return LevelRaiseReport(target.D, target.M, 1, target.k, p, n,
                                True, [({}, 1)], (), 1)
    new_primes = prime_factors(S)
    for ell in new_primes:
        if (S // ell) % ell == 0:
            raise NotSquareFree(f"{S} is divisible by {ell}^2")
        if (target.D * target.M * p) % ell == 0:
            raise ValidationError(f"{ell} already divides the level data")
    if classify_parity(target.D, S) != "definite":
        raise NotDefinite(
            f"D*S = {target.D * S} has an even number of prime factors")
    k = target.k
    D_new = target.D * S
    bm, inv_cols = _raised_module(D_new, target.M, k, p, n)
    m = bm.mod
    cols = [list(c) for c in inv_cols]
    dim0 = len(cols)
    good = [q for q in primes_up_to(qmax)
            if (D_new * target.M * p) % q and q in target]
    checked = list(good)
    try:
        for q in good + prime_factors(target.D):
            if not cols:
                break
            if target.D % q == 0:
                if q not in target:
                    continue
                op, a_q = bm.atkin_lehner(q), target.a(q)
                checked.append(q)
            else:
                op, a_q = bm.hecke_matrix(q), target.a(q)
            A = bm.restrict(op, cols)
            rows = [[(A[a][c] - (a_q if a == c else 0)) % m
                     for c in range(len(cols))] for a in range(len(cols))]
            K = nullspace_prime_power(rows, p, n)
            cols = _span_combine(cols, K, m) if K else []
    except SingularMatrix as exc:
        raise PrecisionExhausted(f"kernel search degenerated mod p^{n}: {exc}")
    if not cols:
        return LevelRaiseReport(D_new, target.M, S, k, p, n, False, [],
                                tuple(checked), dim0)
    matches = []
    stack = [(cols, {})]
    for ell in new_primes:
        w_op = bm.atkin_lehner(ell)
        scale = pow(ell, (k - 2) // 2, m)
        nxt = []
        for cur, signs in stack:
            W = bm.restrict(w_op, cur)
            for eps in (1, -1):
                lam = eps * scale % m
                rows = [[(W[a][c] - (lam if a == c else 0)) % m
                         for c in range(len(cur))] for a in range(len(cur))]
                K = nullspace_prime_power(rows, p, n)
                if K:
                    nxt.append((_span_combine(cur, K, m),
                                {**signs, ell: eps}))
        stack = nxt
    for cur, signs in stack:
        matches.append((tuple(sorted(signs.items())), len(cur)))
    return LevelRaiseReport(D_new, target.M, S, k, p, n, bool(matches),
                            matches, tuple(checked), dim0)


# ----- symbolic corestriction verifier --------------------------------------

MUTATIONS = ("drop-second-term", "flip-second-sign", "swap-degree",
             "drop-unit-index", "shrink-high-degree")


def _lau_mul(a, b, m):
    out = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = e1 + e2
            c = (out.get(e, 0) + c1 * c2) % m
            if c:
                out[e] = c
            elif e in out:
                del out[e]
    return out


def _elt_sub(x, y, m):
    out = {j: dict(lau) for j, lau in x.items()}
    for j, lau in y.items():
        tgt = out.setdefault(j, {})
        for e, c in lau.items():
            c2 = (tgt.get(e, 0) - c) % m
            if c2:
                tgt[e] = c2
            elif e in tgt:
                del tgt[e]
        if not tgt:
            del out[j]
    return {j: lau for j, lau in out.items() if lau}


def _elt_scale(x, lau, m):
    out = {}
    for j, l0 in x.items():
        prod = _lau_mul(l0, lau, m)
        if prod:
            out[j] = prod
    return out


def _fmt_lau(lau):
    parts = []
    for e in sorted(lau):
        c = lau[e]
        if e == 0:
            parts.append(f"{c}")
        else:
            parts.append(f"{c}*s^{e}")
    return " + ".join(parts) if parts else "0"


class CompatCertificate:
    """Result of the chain check cores(z_m) = z_{m-1}, m = n..1.

    residues[i] is the normal form of cores(z_{n-i}) - z_{n-i-1}: a map
    level -> Laurent polynomial in s, empty iff the step holds.
    """

    __slots__ = ("ok", "n", "case", "residues")

    def __init__(self, ok, n, case, residues):
        self.ok = ok
        self.n = n
        self.case = case
        self.residues = residues

    def __bool__(self):
        return self.ok

    def reduced(self):
        lines = []
        for i, r in enumerate(self.residues):
            m = self.n - i
            body = " + ".join(f"({_fmt_lau(lau)})*y[{j}]"
                              for j, lau in sorted(r.items())) or "0"
            lines.append(f"cores(z_{m}) - z_{m - 1} = {body}")
        return "\n".join(lines)


class FormalHeegnerSystem:
    """Free module of class symbols with the tower's corestriction rules.

    Elements are maps level -> Laurent polynomial in the Frobenius s over
    Z/p^prec; level m stands for the ring class field of conductor p^m, so a
    symbol y[j] with j < m means the restriction of y[j] up to level m.
    T_p is specialized to the scalar a_p = alpha + p^(k-1)/alpha and the unit
    index u = #(units)/2 enters the bottom degree (p -+ 1)/u and the bottom
    Hecke relation. A mutation name from MUTATIONS corrupts exactly one rule,
    for falsifiability tests.
    """

    __slots__ = ("p", "k", "prec", "mod", "alpha", "u", "case", "a_p",
                 "mutation")

    def __init__(self, p, k, prec, alpha, u, case, mutation=None):
        if case not in ("split", "inert"):
            raise ValidationError("case must be 'split' or 'inert'")
        if k < 4 or k % 2:
            raise ValidationError("weight must be even and >= 4")
        if not is_prime(p) or p <= k - 2:
            raise ValidationError("p must be a prime > k-2")
        if prec < 1:
            raise ValidationError("precision must be >= 1")
        if mutation is not None and mutation not in MUTATIONS:
            raise ValidationError(f"unknown mutation {mutation!r}")
        self.p = p
        self.k = k
        self.prec = prec
        self.mod = p ** prec
        self.alpha = alpha % self.mod
        if self.alpha % p == 0:
            raise ValidationError("alpha must be a p-adic unit")
        self.u = u % self.mod
        if u % p == 0:
            raise ValidationError("the unit index must be prime to p")
        self.case = case
        self.mutation = mutation
        ainv = inv_mod(self.alpha, self.mod)
        self.a_p = (self.alpha + p ** (k - 1) * ainv) % self.mod

    # -- elements ---------------------------------------------------------

    def y(self, j):
        return {j: {0: 1}}

    def z(self, n):
        m, p, k = self.mod, self.p, self.k
        ainv = inv_mod(self.alpha, m)
        if n < 0:
            raise ValidationError("tower index must be >= 0")
        if n >= 1:
            return {n: {0: pow(ainv, n, m)},
                    n - 1: {0: -p ** (k - 2) * pow(ainv, n + 1, m) % m}}
        uinv = inv_mod(self.u, m)
        if self.case == "inert":
            c = (1 - p ** (k - 2) * ainv * ainv) * uinv % m
            return {0: {0: c}} if c else {}
        c = p ** ((k - 2) // 2) * ainv % m
        lau = {0: (1 + c * c) * uinv % m}
        off = -c * uinv % m
        if off:
            lau[1] = off
            lau[-1] = off
        return {0: {e: v for e, v in lau.items() if v}}

    # -- rewriting ----------------------------------------------------------

    def _degree(self, mlevel):
        m, p = self.mod, self.p
        if mlevel >= 2:
            d = p - 1 if self.mutation == "shrink-high-degree" else p
            return {0: d % m}
        chi = -1 if self.case == "split" else 1
        if self.mutation == "swap-degree":
            chi = -chi
        return {0: (self.p + chi) * inv_mod(self.u, m) % m}

    def _cores_symbol(self, j):
        # image of y[j] under corestriction from level j to level j-1
        m, p, k = self.mod, self.p, self.k
        if j >= 2:
            second = 0 if self.mutation == "drop-second-term" else p ** (k - 2)
            if self.mutation == "flip-second-sign":
                second = -second
            return {j - 1: {0: self.a_p}, j - 2: {0: (-second) % m}}
        uinv = 1 if self.mutation == "drop-unit-index" else inv_mod(self.u, m)
        if self.case == "inert":
            return {0: {0: self.a_p * uinv % m}}
        c = p ** ((k - 2) // 2) * uinv % m
        lau = {0: self.a_p * uinv % m}
        if c:
            lau[1] = (-c) % m
            lau[-1] = (-c) % m
        return {0: {e: v for e, v in lau.items() if v}}

    def cores(self, elt, mlevel):
        """Corestriction from level mlevel to mlevel - 1, applied per symbol."""
        if mlevel < 1:
            raise ValidationError("cannot corestrict below the base level")
        out = {}
        for j, lau in elt.items():
            if j > mlevel:
                raise ValidationError(
                    f"symbol y[{j}] does not live at level {mlevel}")
            if j == mlevel:
                img = _elt_scale(self._cores_symbol(j), lau, self.mod)
            else:
                img = _elt_scale({j: lau}, self._degree(mlevel), self.mod)
            for jj, l2 in img.items():
                tgt = out.setdefault(jj, {})
                for e, c in l2.items():
                    c2 = (tgt.get(e, 0) + c) % self.mod
                    if c2:
                        tgt[e] = c2
                    elif e in tgt:
                        del tgt[e]
        return {j: lau for j, lau in out.items() if lau}

    def verify(self, n, strict=False):
        if n < 1:
            raise ValidationError("need at least one descent step")
        residues = []
        for mlev in range(n, 0, -1):
            r = _elt_sub(self.cores(self.z(mlev), mlev), self.z(mlev - 1),
                         self.mod)
            residues.append(r)
        ok = all(not r for r in residues)
        cert = CompatCertificate(ok, n, self.case, residues)
        if strict and not ok:
            raise NonZeroResidue(cert.reduced())
        return cert


def verify_heegner_compat(n, case, params, mutation=None, strict=False):
    """Certificate that the descent chain closes at depth n.

    params carries p, k, prec, alpha, u (dict); alpha defaults to a random
    unit and u to 1 when omitted. With a mutation from MUTATIONS the
    corresponding rewriting rule is corrupted and the certificate must come
    back false; strict escalates a false certificate to NonZeroResidue.
    """
    p = params["p"]
    k = params["k"]
    prec = params.get("prec", 2 * k)
    alpha = params.get("alpha")
    if alpha is None:
        alpha = random.randrange(1, p) + p * random.randrange(p ** (prec - 1))
    u = params.get("u", 1)
    sys = FormalHeegnerSystem(p, k, prec, alpha, u, case, mutation=mutation)
    return sys.verify(n, strict=strict)
