"""Exact anticyclotomic p-adic L-functions for higher even weight forms.

Pipeline: definite quaternion algebra -> ideal class set -> weight-k Brandt
operators -> ordinary eigenform and its p-stabilization -> Gross-point tower
-> theta elements and the two-variable product L = theta * theta^iota, plus
an admissible-prime sieve, level-raising search, Iwasawa invariants and a
symbolic verifier for the regularized Heegner descent.
"""

__version__ = "0.1.0"

from .padic import PadicInt, CycloElt, kronecker, hensel_sqrt, hensel_unit_root
from .polyrep import SymPoly, rho_act, rho_matrix, pair_k, pairing_gram, w_vector

__all__ = [
    "PadicInt", "CycloElt", "kronecker", "hensel_sqrt", "hensel_unit_root",
    "SymPoly", "rho_act", "rho_matrix", "pair_k", "pairing_gram", "w_vector",
]
