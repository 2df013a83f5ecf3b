"""Exception types raised across the package."""


class Error(Exception):
    """Base class for all mvchain errors."""


class ZeroInverse(Error):
    """Multiplicative inverse of zero was requested."""


class DimensionMismatch(Error):
    """Matrix dimensions are incompatible with the requested operation."""


class DuplicatePoint(Error):
    """Evaluation points that must be pairwise distinct are not."""


class ShapeMismatch(Error):
    """Value matrices passed together do not share a common shape."""


class IndivisibleDimension(Error):
    """A partition count does not divide the matching matrix dimension."""


class ChainShapeMismatch(Error):
    """Adjacent matrices of a chain have incompatible dimensions."""


class IndexOutOfRange(Error):
    """A block or matrix index lies outside its partition range."""


class MissingBlock(Error):
    """A result block grid has a hole where a block is required."""


class PointArityMismatch(Error):
    """An evaluation point has the wrong number of coordinates for a scheme."""


class MissingEvaluation(Error):
    """A grid point has no supplied evaluation."""


class DegreeMismatch(Error):
    """A coefficient tensor's degree bounds do not match a scheme's bounds."""


class SingularSystem(Error):
    """The interpolation system is rank-deficient; decoding is impossible."""


class InfeasiblePlan(Error):
    """A storage plan cannot yield enough computations for recovery."""


class NonIntegralAssignment(Error):
    """Storage fractions produce a non-integer per-worker set size."""


class NeverDecodable(Error):
    """All simulated tasks completed without reaching a decodable set."""
