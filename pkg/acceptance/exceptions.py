from typing import Optional


class TrialError(RuntimeError):
    """An executor could not produce an outcome for a trial
    (as opposed to producing a failed outcome).

    Executors raise this for infrastructure failures;
    validation retries such trials a bounded number of times.
    """
    pass


class TrialAborted(RuntimeError):
    """A trial kept failing with :class:`.TrialError`
    (or a gateway error) after retries.
    The strategy's validation is abandoned rather than scored."""

    def __init__(
        self,
        problem_id: str,
        trial_index: int,
        cause: Optional[BaseException] = None,
    ):
        super().__init__(
            f"Trial {trial_index} for problem {problem_id} "
            f"aborted: {cause}")
        self.problem_id = problem_id
        self.trial_index = trial_index
        self.cause = cause


class ZeroAcceptanceRate(ValueError):
    """A bound was requested for an acceptance rate of zero,
    where it is undefined."""
    pass
