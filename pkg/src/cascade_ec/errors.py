class CascadeError(Exception):
    """Base class for library errors."""


class FieldWidthMismatch(CascadeError, ValueError):
    pass


class NotInvertible(CascadeError, ArithmeticError):
    pass


class InvalidSpec(CascadeError, ValueError):
    pass


class DistinctnessViolated(CascadeError, ValueError):
    pass


class NotApplicable(CascadeError, ValueError):
    pass


class Undecodable(CascadeError):
    pass


class PlanSourceUnavailable(CascadeError, KeyError):
    pass


class NotFound(CascadeError, KeyError):
    pass
