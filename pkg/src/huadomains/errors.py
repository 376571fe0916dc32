"""Exception hierarchy shared by all modules."""


class HuaError(Exception):
    """Base class for every error raised by huadomains."""


class DimensionError(HuaError, ValueError):
    pass


class DomainError(HuaError, ValueError):
    """A point or matrix lies outside the set an operation is defined on.

    ``value`` carries the offending quantity (a margin or a minimum
    eigenvalue) when one is available.
    """

    def __init__(self, message, value=None):
        super().__init__(message)
        self.value = value


class BranchError(HuaError, ArithmeticError):
    """A fractional power or square root could not be continued unambiguously."""


class InvalidSpecError(HuaError, ValueError):
    pass


class NonStandardSpecError(InvalidSpecError):
    pass


class NonSmoothPointError(HuaError, ValueError):
    pass


class SingularPointError(HuaError, ValueError):
    pass


class NotTangentError(HuaError, ValueError):
    pass


class UnsupportedError(HuaError, NotImplementedError):
    pass


class PreconditionError(HuaError, ValueError):
    pass


class InvalidAutomorphismError(HuaError, ValueError):
    pass


class UndeterminedEquivalence(HuaError):
    """Raised when two base domains are a known low-dimensional coincidence.

    The linear isomorphism between such pairs is not constructed here, so the
    decider refuses to answer instead of guessing.
    """


class SmoothnessWarning(UserWarning):
    """Fiber exponent in (0, 1): the boundary is not smooth where that block vanishes."""


class ParseError(HuaError, ValueError):
    """Malformed input file; ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line
