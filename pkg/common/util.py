"""Small general-purpose utilities."""


def clamp(value: float, low: float = 0.0, high: float = 1.0) -> float:
    """Restricts ``value`` to the closed interval ``[low, high]``."""
    return max(low, min(high, value))


def whitespace_token_count(text: str) -> int:
    """Counts whitespace-delimited tokens.

    This is the tokenizer-free token measure used for strategy budgets
    and for scripted usage reporting.
    """
    return len(text.split())
