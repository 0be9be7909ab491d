"""Exception hierarchy shared by the solvers and the CLI."""


class MechlabError(Exception):
    """Base class for all package errors."""


class DomainError(MechlabError, ValueError):
    """An argument lies outside the support [0, 1] or another valid range."""


class UndefinedConditionalError(MechlabError, ValueError):
    """A conditional expectation was requested on a null event."""


class ZeroDensityError(MechlabError, ValueError):
    """A virtual value was requested where the density vanishes."""


class RegularityError(MechlabError, ValueError):
    """The value distribution is not regular (virtual valuation not increasing)."""


class BracketError(MechlabError, ValueError):
    """Root bracket without a sign change."""


class ThresholdNotFoundError(MechlabError, RuntimeError):
    """A critical discount factor could not be located in (0, 1)."""


class UnsupportedDistributionError(MechlabError, ValueError):
    """The requested mechanism is only solved for uniform value and cost laws."""
