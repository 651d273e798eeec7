"""Exception types.

Two families: configuration problems (bad scenario files, unknown names)
and mathematical precondition failures (invalid variances, negative c*).
The CLI maps them to distinct exit codes.
"""


class ConfigurationError(Exception):
    """A scenario/config value is malformed or refers to an unknown name."""


class UnknownConfigError(ConfigurationError):
    """A named variance configuration does not exist."""


class ShrinkageError(Exception):
    """Base class for mathematical precondition failures."""


class NonPositiveVarianceError(ShrinkageError):
    """A variance d_j or prior variance gamma_j violates positivity."""


class NotPositiveDefiniteError(ShrinkageError):
    """A matrix required to be symmetric positive definite is not."""


class DimensionTooSmallError(ShrinkageError):
    """The dimension p is below the minimum the operation supports."""


class NegativeCStarError(ShrinkageError):
    """The minimax constant c* is negative, so the shrinkage family is empty."""


class ConditionAViolatedError(ShrinkageError):
    """A @ Sigma is not nonnegative definite."""


class ConditionA2ViolatedError(ShrinkageError):
    """A Sigma != Sigma A' or Q A != A' Q, so A is not jointly diagonalizable."""


class AlphaBelowFloorError(ShrinkageError):
    """The scale alpha is below alpha_0 = max_j d_j / (d_j + gamma_j)."""
