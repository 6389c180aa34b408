"""Exception hierarchy shared by all engines."""


class SpecsingError(Exception):
    """Base class for every error raised by specsing."""


class ValidationError(SpecsingError, ValueError):
    """A potential, medium or config violates its invariants."""


class UnorderedCenters(ValidationError):
    pass


class CenterOutOfRange(ValidationError):
    pass


class EmptyArray(ValidationError):
    pass


class NonIntegrableProfile(ValidationError):
    pass


class OutsideSlab(ValidationError):
    pass


class NumericalError(SpecsingError, ArithmeticError):
    """A numerical procedure could not deliver a trustworthy value."""


class DeltaNotPointwise(SpecsingError, TypeError):
    """Delta arrays have no pointwise value and cannot be integrated as ODE input."""


class ZeroWaveNumber(NumericalError):
    pass


class StepSizeUnderflow(NumericalError):
    pass


class RefractiveRootVanishes(NumericalError):
    pass


class QuadratureFailure(NumericalError):
    pass


class NotAtSingularity(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class JacobianSingular(NumericalError):
    pass


class DegenerateXY(NumericalError):
    pass


class DegenerateF010(NumericalError):
    pass


class NoRootInRange(NumericalError):
    pass
