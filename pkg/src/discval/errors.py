"""Exception hierarchy shared by all engine modules.

Contract errors mean the caller violated a precondition; inconclusive errors
mean the engine hit a precision or iteration ceiling and honestly cannot
decide.  The CLI maps these onto exit codes (2 and 3 respectively).
"""


class EngineError(Exception):
    """Base class for every error raised by this package."""


class StructuralError(EngineError):
    """Malformed input: arity mismatch, bad index, illegal shift, bad step."""


class ContractError(EngineError):
    """An operation's precondition does not hold for these values."""


class PoleError(EngineError):
    """Evaluation point hits a denominator zero; caller may retry."""


class NotAUnitError(EngineError):
    """invert_unit needs order exactly 0."""


class IndeterminateError(EngineError):
    """Asked for a coefficient the truncation cannot pin down."""


class KernelSuspicionError(EngineError):
    """A series became indistinguishable from 0 at working precision.

    The engine never claims an element is in the kernel; it only flags that
    the truncation cannot separate it from 0.  ``spec_after`` carries the
    state that triggered the suspicion when a transform produced it.
    """

    def __init__(self, message, spec_after=None):
        super().__init__(message)
        self.spec_after = spec_after


class PrecisionCeilingError(EngineError):
    """raise_precision has no generator source able to emit more terms."""


class InconclusiveError(EngineError):
    """An iteration cap was reached before the procedure could decide."""


class RepresentativeMissingError(EngineError):
    """pullback needs a K-representative that was never attached."""


class SpecParseError(EngineError):
    """Spec file or element string does not conform to the grammar."""

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"line {line}: {message}" if column is None else (
                f"line {line}, column {column}: {message}")
        super().__init__(message)
        self.line = line
        self.column = column
