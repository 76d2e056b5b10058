"""Exception hierarchy shared by every module.

Each exception carries an ``exit_code`` used by the command-line driver:
2 for a violated precondition and 3 when precision is insufficient to decide.
"""


class ArtifactError(Exception):
    exit_code = 2


class PreconditionError(ArtifactError):
    """Input violates a documented precondition."""


class PrecisionError(ArtifactError):
    """The requested answer is not determined at the available precision."""

    exit_code = 3


# field_arith
class NonFundamentalDiscriminant(PreconditionError):
    pass


class RamifiedPrime(PreconditionError):
    pass


class BoundTooSmall(ArtifactError):
    pass


# padic_arith
class ZeroToPrecision(PrecisionError):
    pass


class NonUnit(PreconditionError):
    pass


class SingularSystem(PrecisionError):
    pass


# characters
class InconsistentValues(PreconditionError):
    pass


# zeta
class PoleAtOne(PreconditionError):
    pass


class DecompositionFailure(ArtifactError):
    pass


class TruncationInsufficient(PrecisionError):
    pass


class InconclusiveOrder(PrecisionError):
    pass


# eisenstein
class UnexpectedVanishing(ArtifactError):
    pass


class IncompleteCuspData(PreconditionError):
    pass


# gross_stark
class NotSplit(PreconditionError):
    pass


class NonQuadratic(PreconditionError):
    pass


class SearchExhausted(ArtifactError):
    pass


class InconclusivePrecision(PrecisionError):
    pass


class RankUnstable(PrecisionError):
    pass


# deformation
class SumVanishes(PreconditionError):
    pass


class NotApplicable(PreconditionError):
    pass


# cli
class CorruptCacheEntry(ArtifactError):
    pass
