from typing import Any, List, Optional
from unittest import TestCase

import requests
from django.test import override_settings

from ..adapters import (
    AnthropicMessagesEndpoint,
    OpenAIChatEndpoint,
    build_endpoint,
)
from ..exceptions import (
    ProtocolError,
    TransientError,
    TransportError,
    UnknownProvider,
)
from ..scripted import ScriptedEndpoint
from ..types import CompletionRequest, ProviderConfig


class FakeResponse:

    def __init__(self, status_code: int, payload: Any = None, text=''):
        self.status_code = status_code
        self.payload = payload
        self.text = text

    def json(self):
        if self.payload is None:
            raise ValueError("No JSON object could be decoded")
        return self.payload


class FakeSession:
    """Returns queued responses and remembers what was posted."""

    def __init__(self, *responses: Any):
        self.responses = list(responses)
        self.posted: List[dict] = []

    def post(self, url, json=None, headers=None, timeout=None):
        self.posted.append({'url': url, 'json': json, 'headers': headers})
        response = self.responses.pop(0)
        if isinstance(response, Exception):
            raise response
        return response


REQUEST = CompletionRequest(
    model_id='small-core',
    system_prompt='Be brief.',
    user_content='What is 2 + 2?',
    max_tokens=64,
    seed=7,
)


def config(provider: str, base_url: Optional[str] = 'https://models.test'):
    return ProviderConfig(
        provider=provider,
        base_url=base_url or '',
        model_id='small-core',
    )


class OpenAIChatEndpointTestCase(TestCase):

    def endpoint(self, session):
        return OpenAIChatEndpoint(
            config('openai-chat'), api_key='secret', session=session)

    @override_settings(SERVICE_NAME='gcop', SNAPSHOT='1.2.0')
    def test_round_trip(self):
        session = FakeSession(FakeResponse(200, {
            'choices': [{'message': {'role': 'assistant', 'content': '4'}}],
            'usage': {'prompt_tokens': 12, 'completion_tokens': 1},
        }))
        raw = self.endpoint(session).send(REQUEST, 'cid-1')
        self.assertEqual(raw.text, '4')
        self.assertEqual(raw.input_tokens, 12)
        self.assertEqual(raw.output_tokens, 1)

        posted = session.posted[0]
        self.assertEqual(posted['url'], 'https://models.test/chat/completions')
        self.assertEqual(posted['headers']['Authorization'], 'Bearer secret')
        self.assertEqual(posted['headers']['X-Request-ID'], 'cid-1')
        self.assertEqual(posted['headers']['User-Agent'], 'gcop/1.2.0')
        self.assertEqual(
            [m['role'] for m in posted['json']['messages']],
            ['system', 'user'])
        self.assertEqual(posted['json']['seed'], 7)
        self.assertEqual(posted['json']['temperature'], 0.6)

    def test_rate_limit_and_server_errors_are_transient(self):
        for status in (429, 500, 503):
            with self.subTest(status=status):
                session = FakeSession(FakeResponse(status))
                with self.assertRaises(TransientError) as ctx:
                    self.endpoint(session).send(REQUEST, 'cid')
                self.assertEqual(ctx.exception.status_code, status)

    def test_connection_errors_are_transient(self):
        session = FakeSession(requests.exceptions.ConnectionError('down'))
        with self.assertRaises(TransientError):
            self.endpoint(session).send(REQUEST, 'cid')

    def test_client_errors_are_final(self):
        session = FakeSession(FakeResponse(401, text='bad key'))
        with self.assertRaises(TransportError) as ctx:
            self.endpoint(session).send(REQUEST, 'cid-2')
        self.assertEqual(ctx.exception.correlation_id, 'cid-2')

    def test_fail_on_malformed_payload(self):
        for response in (
            FakeResponse(200, None),
            FakeResponse(200, {'choices': []}),
            FakeResponse(200, {'choices': [{'message': {'content': 'x'}}]}),
        ):
            with self.subTest(payload=response.payload):
                with self.assertRaises(ProtocolError):
                    self.endpoint(FakeSession(response)).send(REQUEST, 'c')

    def test_fail_without_base_url(self):
        with self.assertRaises(ValueError):
            OpenAIChatEndpoint(config('openai-chat', None), api_key='k')


class AnthropicMessagesEndpointTestCase(TestCase):

    def test_round_trip(self):
        session = FakeSession(FakeResponse(200, {
            'content': [
                {'type': 'text', 'text': 'The answer '},
                {'type': 'text', 'text': 'is 4.'},
            ],
            'usage': {'input_tokens': 15, 'output_tokens': 5},
        }))
        endpoint = AnthropicMessagesEndpoint(
            config('anthropic-messages'), api_key='secret', session=session)
        raw = endpoint.send(REQUEST, 'cid')
        self.assertEqual(raw.text, 'The answer is 4.')
        self.assertEqual(raw.input_tokens, 15)

        posted = session.posted[0]
        self.assertEqual(posted['url'], 'https://models.test/v1/messages')
        self.assertEqual(posted['headers']['x-api-key'], 'secret')
        self.assertEqual(posted['json']['system'], 'Be brief.')
        self.assertEqual(len(posted['json']['messages']), 1)


class BuildEndpointTestCase(TestCase):

    def test_registered_providers(self):
        endpoint = build_endpoint(ProviderConfig(
            provider='scripted',
            model_id='small-core',
            script={'What is 2 + 2?': '4'},
        ))
        self.assertIsInstance(endpoint, ScriptedEndpoint)
        self.assertIsInstance(
            build_endpoint(config('openai-chat')), OpenAIChatEndpoint)

    def test_fail_on_unknown_provider(self):
        with self.assertRaises(UnknownProvider):
            build_endpoint(config('carrier-pigeon'))
