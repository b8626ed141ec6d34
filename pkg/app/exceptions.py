"""Exception hierarchy for the cohomology engine"""


class S3CohomologyError(Exception):
    """Base class for all engine errors"""


class InvalidConfigError(S3CohomologyError):
    """Run configuration rejected (non-prime modulus, bad bounds, ...)"""


class ModulusError(S3CohomologyError):
    """Operation requires a prime modulus"""


class DimensionMismatchError(S3CohomologyError):
    """Vectors or matrices of incompatible shapes"""


class DivisibilityError(S3CohomologyError):
    """An exact division by p or by a v_k left a remainder"""

    def __init__(self, message: str, remainder=None):
        super().__init__(message)
        self.remainder = remainder


class IntegralityError(S3CohomologyError):
    """A BP expression that must be p-integral is not"""


class BasisCapExceeded(S3CohomologyError):
    """Enumeration of a graded piece exceeded the configured cap"""

    def __init__(self, what: str, size: int, cap: int):
        super().__init__(f"{what}: {size} basis elements exceeds cap {cap}")
        self.size = size
        self.cap = cap


class NotACocycleError(S3CohomologyError):
    """A class was requested for a cochain that is not closed"""


class NotInSpanError(S3CohomologyError):
    """A cocycle is not in the span of the named classes plus coboundaries"""


class ConvergenceError(S3CohomologyError):
    """The filtration spectral sequence does not converge to the direct computation"""

    def __init__(self, message: str, dump=None):
        super().__init__(message)
        self.dump = dump or {}
