"""Error taxonomy shared by every module.

Each class maps to one failure mode of the pipeline; the CLI translates them
to exit codes (2 = bad input, 3 = violated mathematical invariant, 4 = I/O).
"""


class ThetaforgeError(Exception):
    exit_code = 3


class ValidationError(ThetaforgeError):
    """Input parameters violate a documented precondition."""
    exit_code = 2


class BadPrime(ValidationError):
    pass


class BadLevel(ValidationError):
    pass


class NotSquareFree(ValidationError):
    pass


class NotDefinite(ValidationError):
    pass


class HeegnerHypothesisFailed(ValidationError):
    pass


class NotOrdinary(ValidationError):
    pass


class AnomalousSplit(ValidationError):
    pass


class NotSquare(ThetaforgeError):
    pass


class SingularMatrix(ThetaforgeError):
    pass


class NonInvertibleWeight(ThetaforgeError):
    pass


class MassMismatch(ThetaforgeError):
    """Class-set enumeration closed without exhausting the Eichler mass."""


class NotSplit(ThetaforgeError):
    """Eigenspace failed to be free of rank one at the working precision."""


class PrecisionExhausted(ThetaforgeError):
    pass


class IndexingGap(ThetaforgeError):
    pass


class ConductorMismatch(ThetaforgeError):
    pass


class EmbeddingNotFound(ThetaforgeError):
    pass


class CompatibilityFailure(ThetaforgeError):
    pass


class NonZeroResidue(ThetaforgeError):
    """Strict-mode descent verification left a nonzero symbolic residue."""


class MissingEigenvalue(ThetaforgeError):
    pass


class CacheCorrupt(ThetaforgeError):
    exit_code = 4
