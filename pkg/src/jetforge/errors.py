"""Exception hierarchy shared by all jetforge modules."""


class JetError(ValueError):
    """Base class for every mathematical refusal raised by jetforge."""


class FieldMismatchError(JetError):
    pass


class ShapeError(JetError):
    """Operands disagree on number of variables, truncation degree or field."""


class PrecisionError(JetError):
    """The truncation degree is too small for the requested answer."""


class DomainError(JetError):
    """An argument violates a documented precondition (valuation, linear part, ...)."""


class ResonanceError(JetError):
    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class DecompositionError(JetError):
    """A jet commutes with a flow but cannot be split inside the active field."""


class UndecidedError(JetError):
    """The jet is the identity at the working precision; no witness exists below it."""


class ParseError(JetError):
    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position
