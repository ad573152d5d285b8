"""Exception types shared across the library."""


class PolyanError(Exception):
    """Base class for all polyan errors."""


class ContractError(PolyanError, ValueError):
    """Arguments violate an operation's contract (dimension, basis or config mismatch)."""


class DomainError(PolyanError, ValueError):
    """A point lies outside the domain a field or path is defined on."""


class ConeError(DomainError):
    """A displacement or momentum leaves the positive cone of the quartic metric."""


class ZeroDivisorError(PolyanError, ArithmeticError):
    """Division attempted by a zero divisor of the algebra."""


class SingularQError(PolyanError, ArithmeticError):
    """Invariant derivative requested but the q-tensor of the algebra is singular."""


class IntegrationError(PolyanError, RuntimeError):
    """A trajectory integration produced a non-finite state."""
