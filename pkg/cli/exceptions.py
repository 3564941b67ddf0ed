from typing import Sequence


class ConfigError(ValueError):
    """A run configuration could not be read or is invalid."""

    def __init__(self, problems: Sequence[str]):
        super().__init__("; ".join(problems))
        self.problems = list(problems)


class VerificationFailed(RuntimeError):
    """A verified inequality failed on at least one instance."""

    def __init__(self, violations: Sequence[str]):
        super().__init__(
            f"{len(violations)} violation(s): " + "; ".join(violations[:10]))
        self.violations = list(violations)
