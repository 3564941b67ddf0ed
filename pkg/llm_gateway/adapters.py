"""Provider adapters behind the :class:`~llm_gateway.gateway.Endpoint`
contract.

Each adapter maps a :class:`~llm_gateway.types.CompletionRequest`
to one provider's wire format (role-tagged messages plus a usage block
in the reply) and registers itself under a provider ID.
"""

from typing import Any, Callable, Dict, Optional
import logging

import requests
from django.conf import settings

from .exceptions import (
    ProtocolError,
    TransientError,
    TransportError,
    UnknownProvider,
)
from .types import CompletionRequest, ProviderConfig, RawCompletion


log = logging.getLogger(__name__)


EndpointFactory = Callable[[ProviderConfig], Any]


registry: Dict[str, EndpointFactory] = {}
"""Registry of endpoint factories by provider ID."""


def register(id: str):
    """Parametrized decorator that, given provider ID,
    registers a callable that builds an endpoint
    from a :class:`~llm_gateway.types.ProviderConfig`."""
    def wrapper(factory: EndpointFactory):
        registry[id] = factory
        return factory
    return wrapper


def build_endpoint(config: ProviderConfig):
    """Instantiates the adapter registered for ``config.provider``.

    :raises llm_gateway.exceptions.UnknownProvider:
    """
    try:
        factory = registry[config.provider]
    except KeyError:
        raise UnknownProvider(
            f"No adapter for provider {config.provider!r}; "
            f"known: {', '.join(sorted(registry))}")
    return factory(config)


USER_AGENT_TEMPLATE = '{name}/{version}'


class HTTPEndpoint:
    """Shared plumbing: one JSON POST per attempt, with HTTP failures
    sorted into retryable and final ones."""

    path: str = ''

    def __init__(
        self,
        config: ProviderConfig,
        api_key: Optional[str] = None,
        session: Optional[requests.Session] = None,
        timeout: Optional[float] = None,
    ):
        if not config.base_url:
            raise ValueError(f"{config.provider} requires base_url")
        self.config = config
        self.api_key = api_key or settings.API_KEY
        self.session = session or requests.Session()
        self.timeout = timeout or settings.REQUEST_TIMEOUT_SEC

    def headers(self) -> Dict[str, str]:
        raise NotImplementedError()

    def payload(self, request: CompletionRequest) -> Dict[str, Any]:
        raise NotImplementedError()

    def parse(self, data: Dict[str, Any]) -> RawCompletion:
        raise NotImplementedError()

    def send(
        self,
        request: CompletionRequest,
        correlation_id: str,
    ) -> RawCompletion:
        url = self.config.base_url.rstrip('/') + self.path
        try:
            resp = self.session.post(
                url,
                json=self.payload(request),
                headers={
                    **self.headers(),
                    'User-Agent': USER_AGENT_TEMPLATE.format(
                        name=settings.SERVICE_NAME,
                        version=settings.SNAPSHOT),
                    'X-Request-ID': correlation_id,
                },
                timeout=self.timeout,
            )
        except (
            requests.exceptions.ConnectionError,
            requests.exceptions.Timeout,
        ) as err:
            raise TransientError(
                f"Error connecting to {url}: {err}", correlation_id)

        if resp.status_code == 429 or resp.status_code >= 500:
            raise TransientError(
                f"{url} answered HTTP {resp.status_code}",
                correlation_id,
                resp.status_code)
        if resp.status_code >= 400:
            raise TransportError(
                f"{url} refused the request with HTTP {resp.status_code}: "
                f"{resp.text[:200]}",
                correlation_id)

        try:
            data = resp.json()
        except ValueError:
            raise ProtocolError(
                f"Could not decode response from {url}", correlation_id)
        try:
            return self.parse(data)
        except (KeyError, IndexError, TypeError, ValueError) as err:
            raise ProtocolError(
                f"Unexpected response shape from {url}: {err!r}",
                correlation_id)


@register('openai-chat')
class OpenAIChatEndpoint(HTTPEndpoint):
    """Chat-completions style APIs (also served by most
    open-weight model servers)."""

    path = '/chat/completions'

    def headers(self):
        return {'Authorization': f'Bearer {self.api_key or ""}'}

    def payload(self, request):
        messages = []
        if request.system_prompt:
            messages.append({
                'role': 'system',
                'content': request.system_prompt,
            })
        messages.append({'role': 'user', 'content': request.user_content})
        payload = {
            'model': request.model_id,
            'messages': messages,
            'max_tokens': request.max_tokens,
            'temperature': request.temperature,
            'top_p': request.top_p,
        }
        if request.seed is not None:
            payload['seed'] = request.seed
        return payload

    def parse(self, data):
        usage = data['usage']
        return RawCompletion(
            text=data['choices'][0]['message']['content'] or '',
            input_tokens=usage['prompt_tokens'],
            output_tokens=usage['completion_tokens'],
        )


@register('anthropic-messages')
class AnthropicMessagesEndpoint(HTTPEndpoint):
    """Messages style APIs, with the system prompt
    as a top-level field."""

    path = '/v1/messages'

    api_version = '2023-06-01'

    def headers(self):
        return {
            'x-api-key': self.api_key or '',
            'anthropic-version': self.api_version,
        }

    def payload(self, request):
        payload = {
            'model': request.model_id,
            'messages': [{'role': 'user', 'content': request.user_content}],
            'max_tokens': request.max_tokens,
            'temperature': request.temperature,
            'top_p': request.top_p,
        }
        if request.system_prompt:
            payload['system'] = request.system_prompt
        return payload

    def parse(self, data):
        usage = data['usage']
        text = ''.join(
            block['text']
            for block in data['content']
            if block.get('type') == 'text'
        )
        return RawCompletion(
            text=text,
            input_tokens=usage['input_tokens'],
            output_tokens=usage['output_tokens'],
        )

