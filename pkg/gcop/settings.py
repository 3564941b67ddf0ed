"""Settings for the GCoP toolkit.

Everything is read from the environment with workable defaults,
so that commands and the test suite run offline without any setup.
Credentials are never read from configuration files.
"""

from typing import Any, Dict, List, Optional
from pathlib import Path
from os import environ


BASE_DIR = Path(__file__).resolve().parent.parent

DEBUG = int(environ.get("DEBUG", default=0)) == 1

LOG_LEVEL = environ.get("GCOP_LOG_LEVEL", "INFO")

LOGGING: Dict[str, Any] = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(asctime)s %(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'DEBUG' if DEBUG else LOG_LEVEL,
    },
}


# Service info (custom)
# =====================

SNAPSHOT = environ.get("SNAPSHOT", "dev")
"""Version of this codebase at runtime, reported to Sentry
and in request user agents."""

SERVICE_NAME = environ.get("SERVICE_NAME", "gcop")
"""Short name, used in request user agents."""


if environ.get("SENTRY_DSN", None):
    import sentry_sdk
    import logging
    from sentry_sdk.integrations.logging import LoggingIntegration

    sentry_sdk.init(
        dsn=environ.get("SENTRY_DSN"),
        integrations=[
            LoggingIntegration(
                level=logging.ERROR,
                event_level=logging.ERROR,
            ),
        ],
        release=SNAPSHOT,
        traces_sample_rate=0.0,
        send_default_pii=False,
    )


# Basic Django settings
# =====================

# Commands never serve HTTP, the key only satisfies Django's checks.
SECRET_KEY = environ.get("DJANGO_SECRET", "gcop-commands-only")

ALLOWED_HOSTS: List[str] = []

INSTALLED_APPS = [
    'policy_core.app.Config',
    'mixture_sim.app.Config',
    'acceptance.app.Config',
    'strategy_format.app.Config',
    'reward_engine.app.Config',
    'guide_trainer.app.Config',
    'llm_gateway.app.Config',
    'cli.app.Config',
]

# No app keeps state in a database.
DATABASES: Dict[str, Any] = {}

CACHES = {
    'default': {
        'BACKEND': 'django.core.cache.backends.locmem.LocMemCache',
        'LOCATION': 'gcop-baselines',
        'TIMEOUT': None,
        'OPTIONS': {
            'MAX_ENTRIES': 100_000,
        },
    },
}

TIME_ZONE = 'UTC'
USE_TZ = True

SILENCED_SYSTEM_CHECKS: List[str] = []


# Gateway
# =======

API_KEY: Optional[str] = environ.get("GCOP_API_KEY", None)
"""Credential for black-box model endpoints.
Only ever taken from the environment."""

MAX_IN_FLIGHT = int(environ.get("GCOP_MAX_IN_FLIGHT", 8))
"""Global cap on concurrent endpoint calls."""

RETRY_ATTEMPTS = int(environ.get("GCOP_RETRY_ATTEMPTS", 5))
"""Maximum attempts per request, first attempt included."""

RETRY_BASE_MS = int(environ.get("GCOP_RETRY_BASE_MS", 500))
"""Backoff before the second attempt."""

RETRY_FACTOR = float(environ.get("GCOP_RETRY_FACTOR", 2))
"""Backoff multiplier between attempts."""

REQUEST_TIMEOUT_SEC = float(environ.get("GCOP_REQUEST_TIMEOUT_SEC", 60))

TRANSCRIPT_PATH: Optional[str] = environ.get("GCOP_TRANSCRIPT_PATH", None)
"""If set, request/response pairs are appended here as JSON lines."""

PROMPTS_DIR = Path(environ.get(
    "GCOP_PROMPTS_DIR",
    BASE_DIR / 'llm_gateway' / 'prompts'))
"""Where prompt templates are read from."""


# Metrics
# =======

METRICS_TEXTFILE: Optional[str] = environ.get("GCOP_METRICS_TEXTFILE", None)
"""If set, commands dump Prometheus metrics to this file on exit."""


# Defaults
# ========

DEFAULT_STRATEGY_TOKEN_BUDGET = 1024
"""Strategy token budget of curation replies and of ``check_strategy``."""

DEFAULT_CURATION_IN_FLIGHT = int(environ.get("GCOP_CURATION_IN_FLIGHT", 4))
