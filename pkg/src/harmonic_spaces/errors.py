"""Exception hierarchy shared by every module."""


class HarmonicSpacesError(Exception):
    """Base class for all errors raised by the package."""


class DomainError(HarmonicSpacesError, ValueError):
    """A point lies outside the open unit disk."""


class SingularityError(HarmonicSpacesError, ArithmeticError):
    """A division, log or power hit a singular base."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class ArgError(HarmonicSpacesError, ValueError):
    """An argument violates an operation's precondition."""


class NotSensePreserving(HarmonicSpacesError, ValueError):
    """The Jacobian is non-positive (or |w| >= 1) at an evaluation point."""


class NotSelfMap(HarmonicSpacesError, ValueError):
    """A dilatation left the unit disk."""


class InternalMismatch(HarmonicSpacesError, RuntimeError):
    """Two independent computational routes disagree beyond tolerance."""


class NotApplicable(HarmonicSpacesError, ValueError):
    """An estimate falls outside the hypotheses of a check."""


class TailError(HarmonicSpacesError, ValueError):
    """A series has no usable tail bound (divergent or unbounded)."""


class DivergenceSuspected(HarmonicSpacesError, ArithmeticError):
    """Ring contributions of a disk integral failed to decay.

    The partially computed :class:`IntegralResult` is attached as ``result``.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
