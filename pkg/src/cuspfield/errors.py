"""Exception hierarchy.

Every error carries a ``where`` tag naming the module and operation that
raised it, plus an optional ``detail`` (a region id, an arc id, a character
position) so the CLI can report provenance without parsing messages.
"""


class CuspFieldError(Exception):
    where = "cuspfield"

    def __init__(self, message, detail=None):
        super().__init__(message)
        self.detail = detail

    def to_dict(self):
        out = {"error": type(self).__name__, "where": self.where, "message": str(self)}
        if self.detail is not None:
            out["detail"] = self.detail
        return out


# diagram
class DiagramError(CuspFieldError):
    where = "diagram"


class MalformedInput(DiagramError):
    pass


class InconsistentDiagram(DiagramError):
    pass


class DisconnectedDiagram(DiagramError):
    pass


class InvalidDTRealization(DiagramError):
    pass


class InvalidFraction(DiagramError):
    pass


# tt_system
class LabelSystemError(CuspFieldError):
    where = "tt_system"


class UnsupportedDiagram(LabelSystemError):
    pass


class NotHyperbolicCandidate(LabelSystemError):
    pass


class DegenerateLabel(CuspFieldError):
    where = "geometry"


# numsolve
class SolverError(CuspFieldError):
    where = "numsolve"


class PrecisionUnderflow(SolverError):
    pass


class SingularJacobian(SolverError):
    pass


class NoDecrease(SolverError):
    pass


class NoSolutionFound(SolverError):
    pass


class NoGeometricSolution(SolverError):
    pass


class RefinementStalled(SolverError):
    pass


# geometry
class GeometryError(CuspFieldError):
    where = "geometry"


class NegativeDistance(GeometryError):
    pass


class CoincidentPoints(GeometryError):
    pass


# fieldrec
class FieldError(CuspFieldError):
    where = "fieldrec"


class DependentRows(FieldError):
    pass


class NoRelationFound(FieldError):
    pass


class PrecisionTooLow(FieldError):
    pass


class FieldDescriptionIncomplete(FieldError):
    pass


# twobridge
class EliminationError(CuspFieldError):
    where = "twobridge"


class EliminationStuck(EliminationError):
    pass


class DegenerateSystem(EliminationError):
    pass


class RootMismatch(EliminationError):
    pass


class DegreeBoundViolated(EliminationError):
    pass


# cli
class ConfigError(CuspFieldError):
    where = "cli"
