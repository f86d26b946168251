"""Exception hierarchy for the Dunkl-Williams laboratory."""


class LabError(Exception):
    """Base class for every error raised by the laboratory."""


class NonFiniteEntries(LabError, ValueError):
    """A matrix was constructed with NaN or infinite entries."""


class DimensionMismatch(LabError, ValueError):
    """Operands have incompatible shapes."""


class NotHermitian(LabError, ValueError):
    """A Hermitian matrix was required."""


class NoConvergence(LabError, ArithmeticError):
    """The Jacobi eigensolver exhausted its sweep budget."""


class NotPSD(LabError, ValueError):
    """A positive semidefinite matrix was required."""


class NotCoisometryMultiple(LabError, ValueError):
    """An algebra element is not a scalar multiple of a coisometry."""


class InvalidParameters(LabError, ValueError):
    """Construction parameters violate the family's hypotheses."""


class ZeroScalar(InvalidParameters):
    """A scalar family received a zero coefficient."""


class InvalidInstance(LabError, ValueError):
    """An instance violates the hypotheses of the bound."""


class PreconditionViolated(LabError, ValueError):
    """A certifier was called outside its case."""


class InvalidSpec(LabError, ValueError):
    """A forge specification is out of range."""


class WrongDimension(LabError, ValueError):
    """An oracle was called for an unsupported algebra dimension."""


class InvalidTolerance(LabError, ValueError):
    """A tolerance configuration is inconsistent."""


class ArtifactFormatError(LabError, ValueError):
    """A JSON or CSV artefact could not be decoded."""


class BoundViolation(LabError, AssertionError):
    """The generalized Dunkl-Williams bounds failed on an instance.

    Firing this is always a defect: the bounds are theorems.
    """

    def __init__(self, message: str, instance=None, report=None):
        super().__init__(message)
        self.instance = instance
        self.report = report


class UsageError(LabError, ValueError):
    """A command line or run configuration is malformed."""
