"""Curates a supervised strategy corpus with acceptance sampling."""

from typing import Any, Dict, List
from pathlib import Path
import logging

from django.core.management.base import CommandError, CommandParser
from pydantic import ValidationError

from acceptance.curation import (
    PASS_RATE_CSV_HEADER,
    curate,
    pass_rate_table,
    read_corpus,
    read_problems,
    write_corpus,
)
from acceptance.roles import GatewayExecutor, GatewayTeacher
from acceptance.types import CorpusRecord, Problem
from cli.command import EXIT_ENDPOINT, RunCommand
from cli.config import RunConfig
from cli.exceptions import ConfigError
from common.pydantic import format_validation_errors
from common.records import append_jsonl, write_csv, write_jsonl
from policy_core.types import CostLedger


log = logging.getLogger(__name__)


CORPUS_FILE = 'corpus.jsonl'
PARTIAL_CORPUS_FILE = 'corpus.partial.jsonl'
CERTIFICATE_FILE = 'certificate.jsonl'
PASS_RATE_CSV = 'pass-rates.csv'
COSTS_FILE = 'costs.jsonl'


class Command(RunCommand):
    help = (
        "Proposes, validates and refines a strategy for every problem "
        "in the problem file, and writes the corpus with its "
        "acceptance certificate. Exits with status 3 when some problems "
        "could not be curated; rerun with --resume to finish them.")

    def add_overrides(self, parser: CommandParser):
        parser.add_argument(
            '--problems',
            type=Path,
            help="Problem file, one record per line",
        )
        parser.add_argument(
            '--resume',
            action='store_true',
            help="Keep problems finished by an interrupted run",
        )
        parser.add_argument('--k', type=int, help="Trials per strategy")
        parser.add_argument('--tau', type=float, help="Threshold")
        parser.add_argument('--eta', type=float, help="Validation slack")
        parser.add_argument(
            '--m', type=int, help="Samples for the rate bound")
        parser.add_argument(
            '--epsilon', type=float, help="Rate bound width")
        parser.add_argument(
            '--max-refine', type=int, help="Refinements per problem")

    def overrides(self, options):
        problems = options.get('problems')
        return {
            ('curate', 'problems'): str(problems) if problems else None,
            ('acceptance', 'k_trials'): options.get('k'),
            ('acceptance', 'tau'): options.get('tau'),
            ('acceptance', 'eta'): options.get('eta'),
            ('acceptance', 'm_samples'): options.get('m'),
            ('acceptance', 'epsilon'): options.get('epsilon'),
            ('acceptance', 'max_refinements'): options.get('max_refine'),
        }

    def run(self, config: RunConfig, options: Dict[str, Any]):
        seed = config.seed
        assert seed is not None
        problems = self.read_problems(config)

        ledger = CostLedger()
        teacher = self.build_role(
            config.curate.teacher, 'curate.teacher', seed,
            lambda gateway, provider: GatewayTeacher(
                gateway,
                provider.model_id,
                config.curate.budget,
                provider.max_tokens,
            ),
            ledger,
        )
        executor = self.build_role(
            config.curate.executor, 'curate.executor', seed,
            lambda gateway, provider: GatewayExecutor(
                gateway,
                provider.model_id,
                provider.max_tokens,
                provider.temperature,
            ),
            ledger,
        )

        partial = config.out / PARTIAL_CORPUS_FILE
        completed = {}
        if options.get('resume') and partial.exists():
            completed = read_corpus(partial)
        elif partial.exists():
            partial.unlink()

        def keep(problem: Problem, records: List[CorpusRecord]):
            append_jsonl(partial, [record.to_record() for record in records])

        result = curate(
            teacher,
            executor,
            problems,
            config.acceptance,
            seed,
            completed=completed,
            on_problem=keep,
        )
        write_jsonl(
            config.out / COSTS_FILE,
            [entry.to_record() for entry in ledger.entries])

        if result.unresolved:
            for problem_id in result.unresolved:
                self.stderr.write(f"unresolved: {problem_id}")
            raise CommandError(
                f"{len(result.unresolved)} problem(s) could not be curated, "
                f"progress kept in {partial}",
                returncode=EXIT_ENDPOINT)

        write_corpus(config.out / CORPUS_FILE, result.corpus)
        write_jsonl(
            config.out / CERTIFICATE_FILE,
            [result.certificate.to_record()] if result.certificate else [])
        rates = pass_rate_table(
            result.corpus, config.acceptance.max_refinements)
        write_csv(config.out / PASS_RATE_CSV, PASS_RATE_CSV_HEADER, rates)
        if partial.exists():
            partial.unlink()

        self.stdout.write(
            f"{len(result.accepted)} of {len(problems)} problems accepted")
        for round_, accepted, cumulative, rate in rates:
            self.stdout.write(
                f"round {round_}: {accepted} accepted, "
                f"cumulative rate {rate:.3f}")
        if result.certificate:
            cert = result.certificate
            self.stdout.write(
                f"certificate: delta={cert.delta:.4g} "
                f"a_lcb={cert.a_lcb:.4g} bound={cert.bound} "
                f"nonvacuous={cert.nonvacuous}")
        self.stdout.write(f"cost: {ledger.total}")

    def read_problems(self, config: RunConfig) -> List[Problem]:
        path = config.curate.problems
        if path is None:
            raise ConfigError(["curate.problems: required (give --problems)"])
        try:
            problems = read_problems(path)
        except ValidationError as err:
            raise ConfigError([
                f"{path}: {problem}"
                for problem in format_validation_errors(err)])
        except (OSError, ValueError) as err:
            raise ConfigError([f"{path}: {err}"])
        if not problems:
            raise ConfigError([f"{path}: no problems"])
        return problems
