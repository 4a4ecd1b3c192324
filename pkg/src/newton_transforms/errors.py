"""Exception taxonomy shared across the package."""


class InputError(ValueError):
    """Malformed or out-of-contract input (non-finite entries, bad parameters)."""


class DomainError(ValueError):
    """Evaluation requested outside a transform's or profile inverse's domain."""


class CapabilityError(ValueError):
    """Request exceeds a documented size cap (e.g. minor enumeration beyond d = 8)."""


class EvaluationError(ArithmeticError):
    """Loss is not evaluable at the requested point (kink, undefined Hessian)."""


class SingularScalingError(ArithmeticError):
    """Stepsize scaling factor is numerically zero; induced step undefined."""
