"""Sending completion requests with retries, an in-flight cap,
cost metering and optional transcripts."""

from typing import Callable, Optional, Protocol
from pathlib import Path
import logging
import threading
import time
import uuid

import tenacity
from django.conf import settings

from common.records import JsonlAppender
from policy_core.types import CostLedger
from prometheus import metrics

from .exceptions import (
    GatewayError,
    ProtocolError,
    ScriptMiss,
    TransientError,
    TransportError,
)
from .metering import meter_cost
from .types import (
    CompletionRequest,
    CompletionResponse,
    PriceTable,
    RawCompletion,
)


__all__ = (
    'Endpoint',
    'Gateway',
    'shared_in_flight_limiter',
    'complete',
)


log = logging.getLogger(__name__)


_shared_limiter: Optional[threading.BoundedSemaphore] = None
_shared_limiter_lock = threading.Lock()


def shared_in_flight_limiter() -> threading.BoundedSemaphore:
    """Process-wide cap of ``GCOP_MAX_IN_FLIGHT`` concurrent calls,
    used by every gateway not given its own limit."""
    global _shared_limiter
    with _shared_limiter_lock:
        if _shared_limiter is None:
            _shared_limiter = threading.BoundedSemaphore(
                settings.MAX_IN_FLIGHT)
        return _shared_limiter


def _outcome(err: GatewayError) -> str:
    if isinstance(err, ProtocolError):
        return 'protocol_error'
    if isinstance(err, ScriptMiss):
        return 'script_miss'
    return 'transport_error'


class Endpoint(Protocol):
    """A chat-completion endpoint, one attempt per call.

    Implementations raise :class:`~llm_gateway.exceptions.TransientError`
    for failures worth retrying and
    :class:`~llm_gateway.exceptions.ProtocolError` for malformed payloads.
    """

    def send(
        self,
        request: CompletionRequest,
        correlation_id: str,
    ) -> RawCompletion:
        ...


class Gateway:
    """Thread-safe front for an :class:`.Endpoint`.

    Retries transient failures with exponential backoff and jitter,
    caps concurrent calls, and, given a price table and a ledger,
    charges every successful response.
    Defaults come from settings.
    """

    def __init__(
        self,
        endpoint: Endpoint,
        price_table: Optional[PriceTable] = None,
        ledger: Optional[CostLedger] = None,
        max_in_flight: Optional[int] = None,
        retry_attempts: Optional[int] = None,
        retry_base_ms: Optional[int] = None,
        retry_factor: Optional[float] = None,
        transcript_path: Optional[Path] = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.endpoint = endpoint
        self.price_table = price_table
        self.ledger = ledger
        self.max_in_flight = max_in_flight or settings.MAX_IN_FLIGHT
        self.retry_attempts = retry_attempts or settings.RETRY_ATTEMPTS
        self.retry_base_ms = (
            retry_base_ms if retry_base_ms is not None
            else settings.RETRY_BASE_MS)
        self.retry_factor = retry_factor or settings.RETRY_FACTOR
        self._sleep = sleep
        self._in_flight = (
            threading.BoundedSemaphore(max_in_flight) if max_in_flight
            else shared_in_flight_limiter())

        transcript = transcript_path or (
            Path(settings.TRANSCRIPT_PATH)
            if settings.TRANSCRIPT_PATH else None)
        self._transcript = JsonlAppender(transcript) if transcript else None

    def _retrying(self, request: CompletionRequest) -> tenacity.Retrying:
        base = self.retry_base_ms / 1000

        def log_retry(retry_state: tenacity.RetryCallState):
            metrics.gateway_retries.labels(request.model_id).inc()
            outcome = retry_state.outcome
            log.warning(
                "Attempt %s for %s failed (%s), retrying",
                retry_state.attempt_number,
                request.model_id,
                outcome.exception() if outcome else None)

        return tenacity.Retrying(
            stop=tenacity.stop_after_attempt(self.retry_attempts),
            wait=tenacity.wait_exponential_jitter(
                initial=base,
                exp_base=self.retry_factor,
                jitter=base),
            retry=tenacity.retry_if_exception_type(TransientError),
            before_sleep=log_retry,
            sleep=self._sleep,
            reraise=True,
        )

    def complete(self, request: CompletionRequest) -> CompletionResponse:
        """Sends ``request``, retrying transient failures.

        :raises llm_gateway.exceptions.TransportError: retries exhausted
        :raises llm_gateway.exceptions.ProtocolError:
        :raises llm_gateway.exceptions.ScriptMiss:
        :raises llm_gateway.exceptions.UnknownModel: a price table is set
            but does not cover ``request.model_id``
        """
        correlation_id = uuid.uuid4().hex
        started = time.monotonic()
        attempt_count = 0
        raw: Optional[RawCompletion] = None

        with self._in_flight:
            metrics.gateway_in_flight.inc()
            try:
                for attempt in self._retrying(request):
                    with attempt:
                        attempt_count = attempt.retry_state.attempt_number
                        raw = self.endpoint.send(request, correlation_id)
            except TransientError as err:
                self._record_failure(
                    request, correlation_id, 'transport_error', str(err))
                raise TransportError(
                    f"Giving up on {request.model_id} after "
                    f"{attempt_count} attempts: {err}",
                    correlation_id,
                    attempt_count,
                ) from err
            except GatewayError as err:
                err.correlation_id = err.correlation_id or correlation_id
                self._record_failure(
                    request, correlation_id, _outcome(err), str(err))
                raise
            finally:
                metrics.gateway_in_flight.dec()

        assert raw is not None
        elapsed = time.monotonic() - started
        response = CompletionResponse(
            text=raw.text,
            input_tokens=raw.input_tokens,
            output_tokens=raw.output_tokens,
            latency_ms=int(elapsed * 1000),
            attempt_count=attempt_count,
            model_id=request.model_id,
            correlation_id=correlation_id,
        )

        metrics.gateway_requests.labels(request.model_id, 'success').inc()
        metrics.gateway_latency.labels(request.model_id).observe(elapsed)
        metrics.gateway_tokens.labels(request.model_id, 'input').inc(
            response.input_tokens)
        metrics.gateway_tokens.labels(request.model_id, 'output').inc(
            response.output_tokens)

        if self.price_table is not None and self.ledger is not None:
            self.ledger.append(
                meter_cost(response, self.price_table, request.model_id))

        if self._transcript:
            self._transcript.append({
                'correlation_id': correlation_id,
                'outcome': 'success',
                'request': request.to_record(),
                'response': response.dict(),
            })
        return response

    def _record_failure(
        self,
        request: CompletionRequest,
        correlation_id: str,
        outcome: str,
        message: str,
    ):
        metrics.gateway_requests.labels(request.model_id, outcome).inc()
        log.error(
            "Request %s to %s failed: %s",
            correlation_id, request.model_id, message)
        if self._transcript:
            self._transcript.append({
                'correlation_id': correlation_id,
                'outcome': outcome,
                'request': request.to_record(),
                'error': message,
            })


def complete(endpoint: Endpoint, request: CompletionRequest) \
        -> CompletionResponse:
    """One-off completion through a :class:`.Gateway`
    with default settings and no metering."""
    return Gateway(endpoint).complete(request)
