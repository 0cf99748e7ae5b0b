"""Exception hierarchy shared by every module of the package."""


class VIError(Exception):
    """Base class for all errors raised by vimod."""


class DomainError(VIError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ArityError(DomainError):
    """An operation needs a different number of VI factors."""


class SizeCapError(VIError):
    """A combinatorial size guard was exceeded."""


class TruncationError(VIError):
    """A degree outside the evaluation window was requested."""


class ValidationError(VIError, ValueError):
    """A serialized object failed schema or consistency validation."""
