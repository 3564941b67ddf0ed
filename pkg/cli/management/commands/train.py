"""Trains the tabular guide on the synthetic suite and reports the
base, curated and tuned guides side by side."""

from typing import Any, Dict
import logging

from django.core.management.base import CommandParser

from cli.command import RunCommand
from cli.config import RunConfig
from common.records import write_csv
from guide_trainer.checkpoint import save_checkpoint
from guide_trainer.synthetic import SuiteCore, build_suite
from guide_trainer.training import train_variants, value_gap
from reward_engine.engine import ShapedRewardEngine
from reward_engine.judge import GatewayJudge, RuleBasedJudge


log = logging.getLogger(__name__)


CHECKPOINT_FILE = 'checkpoint.yaml'
HISTORY_CSV = 'history.csv'
VARIANTS_CSV = 'variants.csv'

VARIANTS_CSV_HEADER = (
    'name', 'value', 'cost', 'net_utility', 'mean_alpha',
)


class Command(RunCommand):
    help = (
        "Trains the guide with structure-aware group-relative updates "
        "on the synthetic suite. Writes the tuned guide, the training "
        "history and the value and cost of each guide variant "
        "(readable by the frontier command).")

    def add_overrides(self, parser: CommandParser):
        parser.add_argument('--steps', type=int, help="Update steps")
        parser.add_argument(
            '--group-size', type=int, help="Samples per task and step")
        parser.add_argument(
            '--learning-rate', type=float, help="Step size")
        parser.add_argument(
            '--kl', type=float, help="Weight of the reference penalty")
        parser.add_argument(
            '--start',
            choices=('base', 'sft'),
            help="Guide that training starts from",
        )
        parser.add_argument(
            '--tasks', type=int, help="Tasks in the synthetic suite")

    def overrides(self, options):
        return {
            ('train', 'steps'): options.get('steps'),
            ('train', 'group_size'): options.get('group_size'),
            ('train', 'learning_rate'): options.get('learning_rate'),
            ('train', 'kl_coefficient'): options.get('kl'),
            ('suite', 'start'): options.get('start'),
            ('suite', 'tasks'): options.get('tasks'),
        }

    def run(self, config: RunConfig, options: Dict[str, Any]):
        seed = config.seed
        assert seed is not None
        suite = build_suite(config.suite.tasks, config.suite.budget)

        if config.judge is None:
            judge = RuleBasedJudge()
        else:
            judge = self.build_role(
                config.judge, 'judge', seed,
                lambda gateway, provider: GatewayJudge(
                    gateway, provider.model_id),
            )
        engine = ShapedRewardEngine(
            SuiteCore(suite), judge, config.shaping, suite.budget, seed)

        # The run's seed and λ take precedence over the train section.
        train_config = config.train.copy(
            update={'seed': seed, 'lam': config.lam})
        variants, history = train_variants(
            suite,
            engine,
            train_config,
            config.acceptance,
            start=config.suite.start,
        )
        tuned = variants['exectune']

        save_checkpoint(
            config.out / CHECKPOINT_FILE, tuned.params, train_config)
        history.to_csv(config.out / HISTORY_CSV)
        teacher = suite.teacher_report(config.lam)
        rows = [
            (variant.name, variant.report.value, variant.report.cost,
             variant.report.net_utility, variant.mean_alpha)
            for variant in variants.values()
        ]
        rows.append((
            'teacher', teacher.value, teacher.cost,
            teacher.net_utility, ''))
        write_csv(config.out / VARIANTS_CSV, VARIANTS_CSV_HEADER, rows)

        gap = value_gap(tuned.params, suite)
        for variant in variants.values():
            self.stdout.write(
                f"{variant.name}: alpha={variant.mean_alpha:.4f} "
                f"J={variant.report.net_utility:.6f}")
        self.stdout.write(
            f"value gap {gap.gap:.6f} within bound {gap.bound:.6f}: "
            f"{gap.holds}")
        log.info(
            "Trained for %s steps, final mean executability %.4f",
            len(history), tuned.mean_alpha)
