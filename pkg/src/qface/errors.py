class DataError(ValueError):
    """Bad input data: unreadable images, malformed manifests, shape mismatches."""


class NumericalError(ArithmeticError):
    """A numerical precondition failed (e.g. too few positive eigenvalues for r)."""


class RankDeficientError(NumericalError):
    pass
