from typing import Optional


class GatewayError(RuntimeError):
    """Base for endpoint failures.
    Carries the correlation ID of the failed request, when known."""

    def __init__(self, message: str, correlation_id: Optional[str] = None):
        super().__init__(message)
        self.correlation_id = correlation_id


class TransientError(GatewayError):
    """A failure worth retrying: connection problems, timeouts,
    rate limiting (HTTP 429) and server errors (5xx).

    Raised by endpoints; the gateway either retries
    or converts it to :class:`.TransportError`.
    """

    def __init__(
        self,
        message: str,
        correlation_id: Optional[str] = None,
        status_code: Optional[int] = None,
    ):
        super().__init__(message, correlation_id)
        self.status_code = status_code


class TransportError(GatewayError):
    """The request could not be completed: retries were exhausted,
    or the endpoint refused it outright."""

    def __init__(
        self,
        message: str,
        correlation_id: Optional[str] = None,
        attempt_count: int = 0,
    ):
        super().__init__(message, correlation_id)
        self.attempt_count = attempt_count


class ProtocolError(GatewayError):
    """The endpoint answered with a payload that does not follow
    the provider's format."""
    pass


class ScriptMiss(GatewayError):
    """A scripted endpoint or policy has no entry for the requested key."""

    def __init__(self, role: str, key: str):
        super().__init__(f"No scripted {role} for {key!r}")
        self.role = role
        self.key = key


class UnknownModel(ValueError):
    """A model ID is missing from the price table.
    Unknown models are never priced at zero."""

    def __init__(self, model_id: str):
        super().__init__(f"Model {model_id!r} is not in the price table")
        self.model_id = model_id


class UnknownProvider(ValueError):
    """No adapter is registered for the configured provider."""
    pass
