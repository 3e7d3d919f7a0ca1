"""Exception types shared across the package."""


class AZDimerError(Exception):
    """Base class for all package errors."""


class NonBipartite(AZDimerError):
    pass


class NonPlanarEmbedding(AZDimerError):
    pass


class NonDiskFace(AZDimerError):
    pass


class NotMinimal(AZDimerError):
    """Raised by newton_polygon when a minimality condition fails.

    Carries a report listing the violations found.
    """

    def __init__(self, report):
        self.report = report
        super().__init__(f"graph is not minimal: {report}")


class NonSimpleMedialCycle(AZDimerError):
    pass


class NonConsecutiveRevisit(AZDimerError):
    pass


class ColorCountMismatch(AZDimerError):
    pass


class UnsupportedDegenerate(AZDimerError):
    pass


class ComplexResidual(AZDimerError):
    pass


class TooLarge(AZDimerError):
    pass


class NonSimpleBoundary(AZDimerError):
    pass


class RootFindingFailure(AZDimerError):
    pass


class SigmaRealityViolation(AZDimerError):
    pass


class QuadratureFailure(AZDimerError):
    pass


class SlopeOutsidePolygon(AZDimerError):
    pass


class InconsistentOutflows(AZDimerError):
    pass


class OverdeterminedInconsistent(AZDimerError):
    pass
