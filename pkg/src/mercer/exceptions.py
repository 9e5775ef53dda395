"""Exception types shared across the package."""


class DomainError(ValueError):
    """An evaluation point lies outside the domain of definition."""


class EvaluationError(RuntimeError):
    """A function sample came back NaN or infinite.

    Carries the offending abscissa in ``abscissa``.
    """

    def __init__(self, message, abscissa=None):
        super().__init__(message)
        self.abscissa = abscissa


class OutOfValidityError(ValueError):
    """A formula was requested outside the parameter range where it holds."""


class UnsupportedScaleError(ValueError):
    """The requested computation exceeds what double precision can represent."""


class ParseError(ValueError):
    """A serialized expansion file could not be parsed."""


class IntegrityError(ValueError):
    """A deserialized expansion violates a structural invariant."""
