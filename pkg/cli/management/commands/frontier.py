"""Flags the policies on the reward–cost frontier."""

from typing import Any, Dict, List, Tuple
from pathlib import Path
import csv
import logging

from django.core.management.base import CommandParser

from cli.command import RunCommand
from cli.config import RunConfig
from cli.exceptions import ConfigError
from common.records import write_csv
from policy_core.utility import net_utility, pareto_frontier


log = logging.getLogger(__name__)


FRONTIER_CSV = 'frontier.csv'

FRONTIER_CSV_HEADER = (
    'policy_name', 'value', 'cost', 'net_utility', 'on_frontier',
)


def read_points(path: Path) -> List[Tuple[str, float, float]]:
    """Reads ``(name, value, cost)`` from a CSV with those columns,
    such as the variants table written by ``train``.

    :raises cli.exceptions.ConfigError:
    """
    try:
        with open(path, 'r', encoding='utf-8', newline='') as fh:
            rows = list(csv.DictReader(fh))
    except OSError as err:
        raise ConfigError([f"frontier.points: {err}"])
    points = []
    for idx, row in enumerate(rows, start=2):
        try:
            points.append(
                (row['name'], float(row['value']), float(row['cost'])))
        except KeyError as err:
            raise ConfigError([f"{path}: missing column {err}"])
        except (TypeError, ValueError) as err:
            raise ConfigError([f"{path}, line {idx}: {err}"])
    return points


class Command(RunCommand):
    help = (
        "Computes net utility at the configured lambda for a set of "
        "measured policies and flags the non-dominated ones "
        "(higher value, lower cost).")

    stochastic = False

    def add_overrides(self, parser: CommandParser):
        parser.add_argument(
            '--points',
            type=Path,
            nargs='+',
            help="CSV files with name, value and cost columns",
        )
        parser.add_argument(
            '--lambda',
            dest='lam',
            type=float,
            help="Cost sensitivity",
        )

    def overrides(self, options):
        points = options.get('points')
        return {
            ('frontier', 'points'): (
                [str(path) for path in points] if points else None),
            ('lambda', ): options.get('lam'),
        }

    def run(self, config: RunConfig, options: Dict[str, Any]):
        points: List[Tuple[str, float, float]] = []
        for path in config.frontier.points:
            points.extend(read_points(path))
        points.extend(
            (policy.name, policy.value, policy.cost)
            for policy in config.frontier.policies)
        if not points:
            raise ConfigError([
                "frontier: no policies (give --points or "
                "frontier.policies)"])

        reports = [
            net_utility(value, cost, config.lam)
            for _, value, cost in points]
        frontier = pareto_frontier(reports, [name for name, _, _ in points])

        write_csv(config.out / FRONTIER_CSV, FRONTIER_CSV_HEADER, (
            (point.name, point.value, point.cost, point.net_utility,
             str(point.on_frontier).lower())
            for point in frontier
        ))
        for point in frontier:
            if point.on_frontier:
                self.stdout.write(
                    f"{point.name}: value={point.value:.6f} "
                    f"cost={point.cost:.2f} J={point.net_utility:.6f}")
        log.info(
            "%s of %s policies on the frontier",
            sum(1 for point in frontier if point.on_frontier), len(frontier))
