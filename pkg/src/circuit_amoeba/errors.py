"""Exception hierarchy shared by all modules."""


class AmoebaError(Exception):
    """Base class for every error raised by this package."""


class InvalidInput(AmoebaError, ValueError):
    """Malformed input data (bad JSON, wrong lengths, non-finite numbers)."""


class DegenerateSimplex(InvalidInput):
    pass


class PointNotInterior(InvalidInput):
    pass


class MagnitudeTooLarge(InvalidInput):
    """Integer data would overflow the signed 64-bit range."""


class DimensionTooLarge(AmoebaError):
    pass


class InnerCoefficientZero(AmoebaError):
    pass


class InnerCoefficientNonzero(AmoebaError):
    pass


class NotBarycentric(AmoebaError):
    pass


class OrderAmbiguous(AmoebaError):
    pass


class QuadratureSingular(AmoebaError):
    pass


class ExpansionBudgetExceeded(AmoebaError):
    pass


class LiftFailed(AmoebaError):
    pass


class PreconditionFailed(AmoebaError):
    pass


class VerificationFailed(AmoebaError):
    def __init__(self, stage, index, detail=""):
        self.stage = stage
        self.index = index
        super().__init__(f"path stage {stage}, sample {index} is not genus 1 {detail}".rstrip())
