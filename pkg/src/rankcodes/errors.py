"""Exception types shared across the package."""


class RankCodesError(Exception):
    """Base class for all errors raised by rankcodes."""


class ParameterError(RankCodesError, ValueError):
    """Invalid parameters for a field, code family or geometric object."""


class CapacityError(RankCodesError):
    """Field order exceeds the supported element-encoding width."""


class FieldMismatchError(RankCodesError, TypeError):
    """Operands live in different field contexts."""


class GuardError(RankCodesError):
    """A brute-force computation would exceed its configured budget."""
