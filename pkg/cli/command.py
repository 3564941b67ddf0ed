"""Base for run commands: config loading, the effective-config echo,
and mapping of failures to exit statuses."""

from typing import Any, Callable, Dict, Optional, Tuple
from pathlib import Path
import logging

import yaml
from django.conf import settings
from django.core.management.base import BaseCommand, CommandError, \
    CommandParser

from acceptance.exceptions import TrialAborted
from guide_trainer.exceptions import NonFiniteGradient
from llm_gateway.adapters import build_endpoint
from llm_gateway.exceptions import GatewayError, UnknownModel
from llm_gateway.gateway import Gateway
from llm_gateway.scripted import load_script, scripted_policy
from llm_gateway.types import ProviderConfig
from policy_core.types import CostLedger
from prometheus.textfile import dump_metrics
from reward_engine.exceptions import DeltaRAborted, JudgeUnavailable

from .config import (
    RoleConfig,
    RunConfig,
    load_run_config,
    nested_overrides,
    write_effective_config,
)
from .exceptions import ConfigError, VerificationFailed


__all__ = (
    'EXIT_OK',
    'EXIT_VERIFICATION',
    'EXIT_CONFIG',
    'EXIT_ENDPOINT',
    'RunCommand',
)


log = logging.getLogger(__name__)


EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_CONFIG = 2
EXIT_ENDPOINT = 3


ENDPOINT_ERRORS = (
    GatewayError,
    TrialAborted,
    DeltaRAborted,
    JudgeUnavailable,
)


class RunCommand(BaseCommand):
    """Takes ``--config``, ``--seed`` and ``--out``,
    plus command-specific overrides.

    Subclasses implement :meth:`run` and declare their overrides
    through :meth:`add_overrides` and :meth:`overrides`.
    """

    stochastic = True
    """Whether the command needs a seed."""

    def add_arguments(self, parser: CommandParser):
        parser.add_argument(
            '--config',
            type=Path,
            help="Run configuration (YAML or JSON)",
        )
        parser.add_argument(
            '--seed',
            type=int,
            help="Overrides the configured seed",
        )
        parser.add_argument(
            '--out',
            type=Path,
            help="Output directory, overrides the configured one",
        )
        self.add_overrides(parser)

    def add_overrides(self, parser: CommandParser):
        pass

    def overrides(self, options: Dict[str, Any]) \
            -> Dict[Tuple[str, ...], Any]:
        """Maps option values onto config paths."""
        return {}

    def run(self, config: RunConfig, options: Dict[str, Any]):
        raise NotImplementedError()

    def load_config(self, options: Dict[str, Any]) -> RunConfig:
        flags = {
            ('seed', ): options.get('seed'),
            ('out', ): (
                str(options['out']) if options.get('out') else None),
            **self.overrides(options),
        }
        config = load_run_config(
            options.get('config'), nested_overrides(flags))
        if self.stochastic and config.seed is None:
            raise ConfigError(["seed: required (give --seed)"])
        return config

    def handle(self, *args, **options):
        try:
            config = self.load_config(options)
        except ConfigError as err:
            for problem in err.problems:
                self.stderr.write(problem)
            raise CommandError(
                "Invalid configuration", returncode=EXIT_CONFIG)

        write_effective_config(config, config.out)
        try:
            self.run(config, options)
        except (ConfigError, UnknownModel) as err:
            raise CommandError(str(err), returncode=EXIT_CONFIG)
        except VerificationFailed as err:
            for violation in err.violations:
                self.stderr.write(violation)
            raise CommandError(str(err), returncode=EXIT_VERIFICATION)
        except NonFiniteGradient as err:
            raise CommandError(str(err), returncode=EXIT_VERIFICATION)
        except ENDPOINT_ERRORS as err:
            log.exception("Endpoint failure")
            raise CommandError(
                f"Endpoint failure: {err}", returncode=EXIT_ENDPOINT)
        finally:
            dump_metrics()

    def build_role(
        self,
        role: Optional[RoleConfig],
        name: str,
        seed: int,
        wrap: Callable[[Gateway, ProviderConfig], Any],
        ledger: Optional[CostLedger] = None,
    ) -> Any:
        """Builds what plays ``name``: a scripted policy,
        or ``wrap`` applied to a gateway for the configured endpoint.

        :raises cli.exceptions.ConfigError: the role is not configured,
            or cannot be set up
        """
        if role is None:
            raise ConfigError([f"{name}: required for this command"])
        if role.script is not None:
            try:
                return scripted_policy(load_script(role.script), seed)
            except (OSError, yaml.YAMLError, ValueError) as err:
                raise ConfigError([f"{name}.script: {err}"])

        provider = role.provider
        assert provider is not None
        if provider.provider != 'scripted' and not settings.API_KEY:
            raise ConfigError([
                f"{name}.provider: GCOP_API_KEY is not set"])
        try:
            endpoint = build_endpoint(provider)
        except ValueError as err:
            raise ConfigError([f"{name}.provider: {err}"])
        gateway = Gateway(
            endpoint,
            price_table=provider.prices,
            ledger=ledger,
        )
        return wrap(gateway, provider)
