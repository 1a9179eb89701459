class CurrentsError(Exception):
    """Base class for every error raised by this package."""


class InvalidGenusError(CurrentsError, ValueError):
    pass


class ShapeError(CurrentsError, ValueError):
    pass


class ParityError(CurrentsError, ValueError):
    pass


class DomainError(CurrentsError, ValueError):
    pass


class ConstructionError(CurrentsError, RuntimeError):
    """Holonomy or curve construction failed a numerical self-check."""


class NonHyperbolicError(CurrentsError, ValueError):
    """A curve word evaluated to an elliptic or parabolic matrix."""


class BudgetError(CurrentsError, RuntimeError):
    def __init__(self, message: str, predicted: float):
        super().__init__(message)
        self.predicted = predicted


class FormatError(CurrentsError, ValueError):
    pass
