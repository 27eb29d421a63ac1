"""Exception hierarchy shared by all freqlab modules."""


class FreqlabError(Exception):
    """Base class for every error raised by freqlab."""


class ParameterError(FreqlabError, ValueError):
    """An argument is outside its documented range."""


class FieldSpecError(ParameterError):
    """A field specification (object or catalog string) is invalid."""


class DomainError(FreqlabError, ValueError):
    """A point, ball or sphere leaves the admissible domain of a field."""


class DegeneratePointError(FreqlabError, ArithmeticError):
    """A quantity is undefined at a critical or vanishing point."""


class FrequencyUndefined(DegeneratePointError):
    """The denominator of a frequency function is below the floor."""

    def __init__(self, r, denominator, floor):
        self.r = r
        self.denominator = denominator
        self.floor = floor
        super().__init__(
            f"frequency undefined at r={r:.6g}: denominator {denominator:.3e} <= floor {floor:.3e}"
        )


class PreconditionError(FreqlabError, ValueError):
    """Input data violates an operation's precondition."""


class NonconvergenceError(FreqlabError, RuntimeError):
    """An iterative solver stopped before reaching its tolerance."""

    def __init__(self, message, residual=float("nan"), iterations=0):
        self.residual = residual
        self.iterations = iterations
        super().__init__(f"{message} (residual={residual:.3e}, iterations={iterations})")
