"""Exception types shared across the package."""


class WeilGammaError(Exception):
    """Base class for all package errors."""


class UnsupportedField(WeilGammaError):
    """The requested ground field is outside the supported families."""


class InsufficientPrecision(WeilGammaError):
    """A decision required more digits than the element carries."""


class PrecisionLoss(InsufficientPrecision):
    """Cancellation consumed the working precision of a computation."""


class DegenerateForm(WeilGammaError):
    """A quadratic form expected to be nondegenerate has zero determinant."""


class NonIntegralGram(WeilGammaError):
    """A lattice operation met a Gram matrix with non-integral entries."""


class SnapFailure(WeilGammaError):
    """A numerical phase was too far from every exact fourth root of unity."""

    def __init__(self, value, residual):
        self.value = value
        self.residual = residual
        super().__init__(f"phase {value!r} is {residual:.3e} away from the nearest fourth root")


class NotStabilized(WeilGammaError):
    """A truncated character sum changed phase between consecutive cutoffs."""

    def __init__(self, k, phase_k, phase_next):
        self.k = k
        self.phase_k = phase_k
        self.phase_next = phase_next
        super().__init__(f"phase at cutoff {k} is {phase_k!r} but {phase_next!r} at the next cutoff")


class Obstructed(WeilGammaError):
    """No two-torsion correction resolves the requested cocycle."""


class DescentError(WeilGammaError):
    """Galois descent produced data violating a well-definedness check."""


class UnsupportedType(WeilGammaError):
    """The requested Cartan type is not in the supported families."""


class EllNotPrime(WeilGammaError):
    """A mod-ell reduction was requested for a composite or unit ell."""


class EllZeroInField(WeilGammaError):
    """The squared-ratio ell vanishes in the ground field, so the
    invertible-ell formulas do not apply."""


class WrongCharacteristic(WeilGammaError):
    """The ground field characteristic does not match the requested branch."""


class FieldMismatch(WeilGammaError):
    """Two objects built over different ground fields were combined."""
