"""Exception hierarchy shared by all modules."""


class TraceZeroError(Exception):
    """Base class for every error raised by this package."""


class NotDivisible(TraceZeroError, ValueError):
    pass


class NonInvertible(TraceZeroError, ZeroDivisionError):
    pass


class EvenModulus(TraceZeroError, ValueError):
    pass


class SingularCurve(TraceZeroError, ValueError):
    pass


class BadReduction(TraceZeroError, ValueError):
    """The prime divides the discriminant of the given model."""

    def __init__(self, p, discriminant=None):
        self.p = p
        self.discriminant = discriminant
        super().__init__(f"bad reduction at p={p}")


class PointNotOnCurve(TraceZeroError, ValueError):
    pass


class AmbiguousOrder(TraceZeroError, RuntimeError):
    pass


class GeneratorSearchExhausted(TraceZeroError, RuntimeError):
    pass


class DegenerateEvaluation(TraceZeroError, ArithmeticError):
    pass


class InternalInconsistency(TraceZeroError, RuntimeError):
    pass


class BudgetExceeded(TraceZeroError, RuntimeError):
    pass


class BadBezout(TraceZeroError, ValueError):
    pass


class VerificationFailed(TraceZeroError, RuntimeError):
    pass


class ClaimFalsified(TraceZeroError, RuntimeError):
    """gcd(alpha_1, alpha_2, alpha_3) != 1 at a good prime.

    The local argument rules this out for independent points on a curve
    without CM, so this is never downgraded to a warning: it means either the
    setup violates the hypotheses or there is a bug.
    """

    def __init__(self, p, alpha):
        self.p = p
        self.alpha = tuple(alpha)
        super().__init__(f"gcd{self.alpha} != 1 at p={p}")


class ComplexMultiplication(TraceZeroError, ValueError):
    """The curve's j-invariant is one of the rational CM values."""


class SetupError(TraceZeroError, ValueError):
    """A setup document does not parse or violates its invariants."""
