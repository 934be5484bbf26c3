"""Exception types shared across the package."""


class PearsonError(ValueError):
    """Base class for invalid inputs to the Pearson machinery."""


class InvalidParams(PearsonError):
    pass


class Unclassifiable(PearsonError):
    pass


class MomentError(PearsonError):
    """Raised when a requested moment does not exist."""


class DomainError(PearsonError):
    """Raised when an operator is applied outside its polynomial domain."""


class NotEigenvalue(PearsonError):
    pass


class NotChaotic(PearsonError):
    pass


class MixedEigenvalues(PearsonError):
    pass


class CoefficientError(PearsonError):
    """Raised for non-symmetric or diagonal-carrying coefficient tensors."""


class BoundInconsistency(ArithmeticError):
    """Raised when an exact inequality that must hold is violated."""
