"""All run metrics live in this one module so the tracked set stays
small and easy to review.
"""

# Empty docstrings let Sphinx autodoc pick up self-explanatory metrics.

from prometheus_client import Counter, Gauge, Histogram


_prefix_ = 'gcop_'


gateway_requests = Counter(
    f'{_prefix_}gateway_requests_total',
    "Completion requests sent to model endpoints",
    ['model', 'outcome'],
    # outcome should be success, transport_error, protocol_error
    # or script_miss
)
""""""


gateway_retries = Counter(
    f'{_prefix_}gateway_retries_total',
    "Retried completion requests",
    ['model'],
)
""""""


gateway_tokens = Counter(
    f'{_prefix_}gateway_tokens_total',
    "Tokens reported by model endpoints",
    ['model', 'direction'],
    # direction is either input or output
)
""""""


gateway_in_flight = Gauge(
    f'{_prefix_}gateway_in_flight',
    "Completion requests currently awaiting a response",
)
""""""


gateway_latency = Histogram(
    f'{_prefix_}gateway_latency_seconds',
    "Completion request latency, including retries",
    ['model'],
)
""""""


curation_outcomes = Counter(
    f'{_prefix_}curation_outcomes_total',
    "Validated strategies during curation",
    ['round', 'outcome'],
    # outcome is either accepted or rejected
)
""""""


verification_violations = Counter(
    f'{_prefix_}verification_violations_total',
    "Instances on which a verified inequality failed",
    ['check'],
)
""""""


training_steps = Counter(
    f'{_prefix_}training_steps_total',
    "Guide optimisation steps taken",
)
""""""
