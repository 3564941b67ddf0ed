class StrategySpaceMismatch(ValueError):
    """Guide and core (or guide and mixture model)
    disagree on the strategy space."""

    def __init__(self, message="Strategy spaces differ", left=(), right=()):
        super().__init__(message)
        self.left = tuple(left)
        self.right = tuple(right)


class NotTabular(ValueError):
    """An exact operation received an external (black-box) policy."""
    pass


class DimensionMismatch(ValueError):
    """Policy and environment disagree on state or action counts."""
    pass


class NegativeLambda(ValueError):
    """Cost sensitivity λ must be non-negative."""
    pass
