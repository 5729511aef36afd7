"""Exception types shared across the package."""


class ToricLGError(Exception):
    pass


# fan validation
class NonSimplicial(ToricLGError):
    pass


class SupportMismatch(ToricLGError):
    pass


class NoConvexSupportFunction(ToricLGError):
    pass


class RayNotInS(ToricLGError):
    pass


class OutsideSupport(ToricLGError):
    pass


class VolumeBoxMismatch(ToricLGError):
    pass


# secondary fan
class TooLarge(ToricLGError):
    pass


class NotAdjacent(ToricLGError):
    pass


# LG model
class IncompleteCount(ToricLGError):
    pass


class NotPositiveReal(ToricLGError):
    pass


class DegenerateCritical(ToricLGError):
    pass


class LostBranch(ToricLGError):
    pass


# cohomology / K-theory
class NotSmooth(ToricLGError):
    pass


class NotComplete(ToricLGError):
    pass


class NonIntegral(ToricLGError):
    pass


class MismatchWithHRR(ToricLGError):
    pass


class RankMismatch(ToricLGError):
    pass


class RelationFails(ToricLGError):
    pass


# mutation
class NotSemiorthogonal(ToricLGError):
    pass


class IndexOutOfRange(ToricLGError):
    pass


class SimultaneousCrossing(ToricLGError):
    pass


class NonAdmissibleEndpoint(ToricLGError):
    pass


class BlockMismatch(ToricLGError):
    pass


# GKZ
class NotInMoriCone(ToricLGError):
    pass


class NotWeakFano(ToricLGError):
    pass


# CLI / scenarios
class ScenarioError(ToricLGError):
    pass
