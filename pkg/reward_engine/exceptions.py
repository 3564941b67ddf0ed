from typing import Optional


class JudgeUnavailable(RuntimeError):
    """The judge could not score a strategy
    (endpoint failure, or a reply without a score)."""
    pass


class DeltaRAborted(RuntimeError):
    """The executor failed while estimating the guided-minus-unguided
    reward difference for a problem."""

    def __init__(
        self,
        problem_id: str,
        cause: Optional[BaseException] = None,
    ):
        super().__init__(
            f"Reward difference for problem {problem_id} "
            f"could not be estimated: {cause}")
        self.problem_id = problem_id
        self.cause = cause
