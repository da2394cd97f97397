"""Exception hierarchy shared by every module.

CLI exit-code mapping: verification/bound failures exit 1, malformed or
unsupported input exits 2, budget overruns exit 3.
"""


class SidonkitError(Exception):
    """Base class for all library errors."""


class MalformedInput(SidonkitError):
    def __init__(self, message, line=None, position=None):
        self.line = line
        self.position = position
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", position {position})" if position is not None else ")")
        super().__init__(message + where)


class NonCanonicalElement(SidonkitError):
    pass


class DuplicateElement(SidonkitError):
    pass


class AmbientMismatch(SidonkitError):
    pass


class UnsupportedMode(SidonkitError):
    pass


class DivisionByZero(SidonkitError):
    pass


class OverflowBudgetExceeded(SidonkitError):
    pass


class CapExceeded(SidonkitError):
    pass


class BadShift(SidonkitError):
    pass


class BadOrder(SidonkitError):
    pass


class EmptyCore(SidonkitError):
    pass


class PreconditionFailed(SidonkitError):
    """A stated hypothesis of an operation fails; carries an optional witness."""

    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message)


class VerificationFailed(SidonkitError):
    """Internal-consistency guard: an algorithm that guarantees a bound
    produced output violating it.  Always indicates a bug, never bad input."""
