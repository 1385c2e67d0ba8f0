"""Exception hierarchy for novlog.

Domain errors (everything below NovlogError except the two input errors)
map to exit code 1 in the CLI; ParseError and ValidationError map to exit
code 2.
"""


class NovlogError(Exception):
    """Base class for all novlog domain errors."""


class UnsupportedGroup(NovlogError):
    """The requested computation needs group structure we do not model."""


class TruncationMismatch(NovlogError):
    """Operands disagree on group or truncation order."""


class NonUnitLeading(NovlogError):
    """Leading coefficient is not invertible in the group algebra."""


class PositiveValuationRequired(NovlogError):
    """Series argument does not meet its valuation precondition."""


class NotInKernel(NovlogError):
    """Witt vector has a nonzero class logarithm, so it cannot be
    factored into commutators."""


class NotUnipotentModT(NovlogError):
    """Matrix is not congruent to the identity modulo t."""


class SingularConstantTerm(NovlogError):
    """Constant part of the matrix is singular over the group algebra."""


class NoUnitPivot(NovlogError):
    """Matrix reduction found no entry with an invertible leading
    coefficient; invertibility cannot be certified."""


class NotAcyclicOrNoPivot(NovlogError):
    """No chain contraction could be exhibited for the complex."""


class BadLabelLevel(NovlogError):
    """An edge label does not sit at grading level -1."""


class NonAbelianGroup(NovlogError):
    """Operation is only defined over abelian groups."""


class PrecisionExhausted(NovlogError):
    """Internal working truncation was not wide enough to certify the
    result; raised only after retries with enlarged guard digits."""


class ParseError(NovlogError):
    """Job file is not syntactically valid JSON."""


class ValidationError(NovlogError):
    """Job file is well-formed JSON but violates the job schema.

    ``path`` locates the offending value as a JSON pointer.
    """

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
