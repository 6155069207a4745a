"""Exception taxonomy shared by all modules.

The CLI maps these onto exit codes: InputError -> 2, NumericError -> 3,
property failures (reported with a witness) -> 1.
"""


class ArrmcError(Exception):
    """Base class for all errors raised by this package."""


class InputError(ArrmcError):
    """Invalid or inconsistent input data."""


class DimensionMismatch(InputError):
    """Objects that must share a shape or an arrangement do not."""


class NotGoodLine(InputError):
    """The supplied line direction is not good for the arrangement."""


class NonIntegrableInput(InputError):
    """A residue family violates the integrability condition."""


class ParameterIntegral(InputError):
    """A convolution parameter (or a required sum of them) is an integer."""


class TrivialCharacter(InputError):
    """The multiplicative character is trivial (value 1)."""


class SingularInput(InputError):
    """A matrix that must be invertible is singular."""


class PropertyFailure(ArrmcError):
    """A mathematical precondition checked at run time does not hold."""


class StarConditionsFail(PropertyFailure):
    """The kernel/image genericity conditions fail for the input system."""


class AssumptionFail(PropertyFailure):
    """The no-nonzero-integer-eigenvalue assumption fails."""


class NumericError(ArrmcError):
    """Numerical integration or comparison could not reach the target."""


class StepUnderflow(NumericError):
    """Adaptive step size collapsed, typically when a path grazes a pole."""


class ToleranceNotMet(NumericError):
    """A numeric result failed its internal consistency tolerance."""


class InternalError(ArrmcError):
    """An invariant that should be unconditionally true was violated."""
