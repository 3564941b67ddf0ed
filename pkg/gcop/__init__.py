"""Project package: settings and environment checks
for the guide–core policy composition toolkit."""

from django.core import checks

from .env_checker import env_checker


checks.register(env_checker)
