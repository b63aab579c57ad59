"""Exception hierarchy shared by all modules.

Every error carries an ``exit_code`` used by the command line front end:
2 for bad input, 3 for an infeasible request, 4 for an exhausted budget.
"""


class EdgeDomError(Exception):
    exit_code = 2


class InvalidInput(EdgeDomError, ValueError):
    """Arguments violate a documented precondition."""


class Infeasible(EdgeDomError):
    """The requested object does not exist for this input."""

    exit_code = 3


# gfield
class NonPrimeCharacteristic(InvalidInput):
    pass


class OrderOverflow(InvalidInput):
    pass


class EvenCharacteristic(InvalidInput):
    pass


class NonDivisor(InvalidInput):
    pass


# core
class ParseError(InvalidInput):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DuplicateBlock(ParseError):
    pass


class IndexOutOfRange(ParseError):
    pass


class InvalidStructure(InvalidInput):
    pass


class TooLarge(InvalidInput):
    pass


class DegenerateStructure(InvalidInput):
    """Structure violates the lambda >= 1 convention."""


# constructions
class OutOfRange(InvalidInput):
    pass


class BadResidueClass(InvalidInput):
    pass


class NotRegular(InvalidInput):
    pass


class DegenerateLambda(InvalidInput):
    pass


class NoSeedAvailable(Infeasible):
    pass


class OddQ(InvalidInput):
    pass


class EvenQ(InvalidInput):
    pass


class SpanTooSmall(InvalidInput):
    pass


class ContainsPlane(InvalidInput):
    pass


class NotHadamard(InvalidInput):
    pass


# matching
class NotBiregular(InvalidInput):
    pass


class UnequalSides(InvalidInput):
    pass


class IsolatedPoint(InvalidInput):
    pass


class WrongOrder(InvalidInput):
    pass


class NoPerfectMatching(Infeasible):
    """Carries the Hall certificate that blocks the perfect matching."""

    def __init__(self, message, certificate):
        super().__init__(message)
        self.certificate = certificate


class BudgetExceeded(EdgeDomError):
    """Search stopped early; ``lower``/``upper`` bracket the optimum."""

    exit_code = 4

    def __init__(self, message, lower, upper, witness=None, nodes=0):
        super().__init__(message)
        self.lower = lower
        self.upper = upper
        self.witness = witness
        self.nodes = nodes


# ifpairs
class NotDominating(InvalidInput):
    pass


class NotAPolarity(InvalidInput):
    pass


class NotIncidenceFree(InvalidInput):
    pass


class NonSquareOrder(InvalidInput):
    pass


class NotFound(Infeasible):
    pass


class BadOrder(InvalidInput):
    pass


class ParameterMismatch(InvalidInput):
    pass


class TooSmallN(InvalidInput):
    pass


# bounds
class NotADesign(InvalidInput):
    pass


class NotSIS(InvalidInput):
    pass
