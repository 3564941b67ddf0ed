from typing import Optional


class GroupTooSmall(ValueError):
    """Group-relative advantages need at least two samples."""
    pass


class NonFiniteGradient(RuntimeError):
    """An update produced NaN or infinite values.
    Parameters are left as they were before the step."""

    def __init__(
        self,
        step: int,
        state: Optional[int] = None,
        detail: str = '',
    ):
        where = f" (state {state})" if state is not None else ''
        super().__init__(
            f"Non-finite gradient at step {step}{where}"
            + (f": {detail}" if detail else ''))
        self.step = step
        self.state = state
        self.detail = detail


class CheckpointError(ValueError):
    """A checkpoint file is unreadable or inconsistent."""
    pass
