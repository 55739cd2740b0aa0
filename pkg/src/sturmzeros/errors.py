"""Exception types raised across the package."""


class PotentialSyntaxError(SyntaxError):
    """Malformed potential expression.

    ``offset`` is the byte offset into the source where parsing stopped and
    ``expected`` describes the token the parser wanted there.
    """

    def __init__(self, message, source, offset, expected):
        super().__init__(f"{message} at offset {offset}: expected {expected}")
        self.source = source
        self.offset = offset
        self.expected = expected


class EvalDomainError(ArithmeticError):
    """Division by zero or a non-finite intermediate during evaluation."""


class BudgetExceeded(ValueError):
    """Exact-arithmetic size limit exceeded."""


class NotConstant(AssertionError):
    """A differential operator expected to produce a constant did not."""


class IntegrationFailure(RuntimeError):
    pass


class BracketFailure(RuntimeError):
    pass


class OrderBudget(ValueError):
    """Derivative order above the supported cap."""


class VerificationFailure(AssertionError):
    pass


class ZeroVector(ValueError):
    pass


class DegenerateProbe(RuntimeError):
    pass


class NearSingular(ArithmeticError):
    """Confluent determinant below the relative singularity threshold."""

    def __init__(self, value, scale, threshold):
        super().__init__(
            f"determinant {value:.3e} below {threshold:.1e} x column-norm product {scale:.3e}"
        )
        self.value = value
        self.scale = scale


class UnresolvedZero(RuntimeError):
    """Multiplicity probing hit the derivative cap without a nonzero derivative."""

    def __init__(self, location):
        super().__init__(f"no nonzero derivative found at x={location!r}")
        self.location = location
