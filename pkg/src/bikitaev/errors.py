"""Exception hierarchy shared by all modules."""


class BikitaevError(Exception):
    """Base class for all errors raised by the package."""


class ShapeMismatch(BikitaevError):
    pass


class AxiomViolation(BikitaevError):
    """A structural identity failed beyond tolerance.

    Attributes
    ----------
    axiom : str
        Name of the violated identity.
    residual : float
        Max-abs residual that was measured.
    """

    def __init__(self, axiom, residual, label=""):
        self.axiom = axiom
        self.residual = float(residual)
        where = f" in {label}" if label else ""
        super().__init__(f"axiom {axiom!r} violated{where}: residual {self.residual:.3e}")


class NotAGroup(BikitaevError):
    def __init__(self, reason, witness=None):
        self.reason = reason
        self.witness = witness
        extra = f" (witness {witness})" if witness is not None else ""
        super().__init__(f"{reason}{extra}")


class AlgebraMismatch(BikitaevError):
    pass


class StarUndefined(BikitaevError):
    pass


class SingularAntipode(AxiomViolation):
    def __init__(self, label=""):
        super().__init__("antipode invertible", float("inf"), label)


class NoHaarIntegral(BikitaevError):
    pass


class NonUniqueHaar(BikitaevError):
    def __init__(self, dimension):
        self.dimension = dimension
        super().__init__(f"Haar solution space has dimension {dimension}")


class NonPositive(BikitaevError):
    def __init__(self, min_eigenvalue):
        self.min_eigenvalue = float(min_eigenvalue)
        super().__init__(f"Gram matrix not positive definite (min eigenvalue {min_eigenvalue:.3e})")


class ParseError(BikitaevError):
    pass


class NonManifold(BikitaevError):
    pass


class EulerMismatch(BikitaevError):
    def __init__(self, declared, computed):
        self.declared = declared
        self.computed = computed
        super().__init__(f"declared genus {declared} but Euler characteristic gives {computed}")


class UnknownFixture(BikitaevError):
    pass


class SiteInvalid(BikitaevError):
    pass


class DimensionMismatch(BikitaevError):
    pass


class DimensionCap(BikitaevError):
    def __init__(self, dim, cap):
        self.dim = dim
        self.cap = cap
        super().__init__(f"space dimension {dim} exceeds cap {cap}")


class ProjectorCheckFailed(BikitaevError):
    def __init__(self, prop, residual):
        self.prop = prop
        self.residual = float(residual)
        super().__init__(f"projector property {prop!r} failed: residual {self.residual:.3e}")


class BoundaryPresent(BikitaevError):
    pass


class MissingBoundaryLabels(BikitaevError):
    pass


class ZeroState(BikitaevError):
    def __init__(self, norm):
        self.norm = float(norm)
        super().__init__(f"contracted state has norm {self.norm:.3e}")
