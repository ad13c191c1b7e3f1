"""Exception hierarchy.

Every domain error derives from :class:`PathProvError`; the CLI prints the
class name on stderr and exits with status 1.
"""


class PathProvError(Exception):
    """Base class for all domain errors raised by this package."""


class ParseError(PathProvError):
    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class GraphDisciplineError(PathProvError):
    """Two edges share an ordered vertex pair in a plain labelled graph."""


class CycleError(PathProvError):
    pass


class DomainMismatch(PathProvError):
    pass


class TooLarge(PathProvError):
    pass


class MissingVariable(PathProvError):
    pass


class OrderMismatch(PathProvError):
    pass


class NotOneWayPath(PathProvError):
    pass


class NotDownwardTree(PathProvError):
    pass


class BudgetExceeded(PathProvError):
    pass


class TooFewBits(PathProvError):
    pass


class WeightOutOfRange(PathProvError):
    pass


class DegreeExceeded(PathProvError):
    pass


class EmptyFormula(PathProvError):
    pass


class LabelOutOfRange(PathProvError):
    pass


class AlphabetMismatch(PathProvError):
    pass


class BoundedLanguage(PathProvError):
    pass


class Unbounded(PathProvError):
    pass


class NotLocal(PathProvError):
    pass


class Unanswerable(PathProvError):
    pass
