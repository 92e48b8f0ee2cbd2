"""Exception hierarchy.

Each error carries an ``exit_code`` so the command line layer can map failures
onto its exit-code contract without a lookup table.
"""


class LagInvError(Exception):
    exit_code = 1


class ValidationError(LagInvError):
    """Input data violates a structural invariant."""

    exit_code = 1


class NonManifold(ValidationError):
    pass


class NonOrientable(ValidationError):
    pass


class Disconnected(ValidationError):
    pass


class DegenerateFrame(ValidationError):
    pass


class ResolutionTooLow(ValidationError):
    pass


class MeshMismatch(ValidationError):
    pass


class WrongGenus(ValidationError):
    pass


class FormValidationError(ValidationError):
    pass


class DegenerateBlock(FormValidationError):
    pass


class NotSPD(FormValidationError):
    pass


class NondegeneracyFailure(FormValidationError):
    pass


class SingularMatrix(ValidationError):
    pass


class BoundaryConditionViolated(ValidationError):
    pass


class ResolutionError(LagInvError):
    """The mesh is too coarse to resolve the data."""

    exit_code = 2


class EdgeAliasing(ResolutionError):
    pass


class TriangleWrap(ResolutionError):
    pass


class UnderResolved(ResolutionError):
    pass


class NotIntegral(ResolutionError):
    pass


class NoRegularValue(ResolutionError):
    pass


class RegularValueDisagreement(ResolutionError):
    pass


class NotRegular(ResolutionError):
    pass


class DegenerateImage(ResolutionError):
    """A simplex's linear image contains the origin; refine the complex."""


class DegenerateTrivialization(ResolutionError):
    pass


class UndefinedInvariant(LagInvError):
    exit_code = 3


class NotNullHomologous(UndefinedInvariant):
    def __init__(self, message, rational_value=None):
        super().__init__(message)
        self.rational_value = rational_value


class InternalError(LagInvError):
    """Raised on conditions that valid inputs can never produce."""

    exit_code = 1


class InternalRankError(InternalError):
    pass


class InconsistentPrismSplit(InternalError):
    pass


class NotACycle(InternalError):
    pass
