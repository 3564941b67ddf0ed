"""Checks the value-gap bound on random instances and the acceptance
guarantees by simulation, writing one CSV report per check."""

from typing import Any, Dict, List
import logging

from django.conf import settings
from django.core.management.base import CommandParser

from acceptance.montecarlo import (
    acceptance_bound_grid,
    lcb_coverage,
    write_coverage,
    write_grid,
)
from cli.command import RunCommand
from cli.config import RunConfig
from cli.exceptions import ConfigError, VerificationFailed
from mixture_sim.gap import InstanceLimits, sweep_value_gap, write_gap_rows


log = logging.getLogger(__name__)


VALUE_GAP_CSV = 'value-gap.csv'
GRID_CSV = 'acceptance-grid.csv'
COVERAGE_CSV = 'coverage.csv'


class Command(RunCommand):
    help = (
        "Checks the value-gap bound on random tabular instances "
        "and the acceptance bounds by Monte-Carlo simulation. "
        "Exits with status 1 if any check fails.")

    def add_overrides(self, parser: CommandParser):
        parser.add_argument(
            '--instances',
            type=int,
            help="Number of random instances in the value-gap sweep",
        )
        parser.add_argument(
            '--bound-scale',
            type=float,
            help="Multiplier on the value-gap bound",
        )
        parser.add_argument(
            '--replications',
            type=int,
            help="Replications per coverage point",
        )
        parser.add_argument(
            '--grid-strategies',
            type=int,
            help="Simulated strategies per acceptance grid cell",
        )

    def overrides(self, options):
        return {
            ('verify', 'instances'): options.get('instances'),
            ('verify', 'bound_scale'): options.get('bound_scale'),
            ('verify', 'replications'): options.get('replications'),
            ('verify', 'grid_strategies'): options.get('grid_strategies'),
        }

    def run(self, config: RunConfig, options: Dict[str, Any]):
        cfg = config.verify
        seed = config.seed
        assert seed is not None
        violations: List[str] = []

        limits = InstanceLimits(
            max_states=cfg.max_states,
            max_actions=cfg.max_actions,
            max_horizon=cfg.max_horizon,
            max_strategies=cfg.max_strategies,
        )
        try:
            rows = sweep_value_gap(
                cfg.instances,
                seed,
                limits,
                max_workers=settings.DEFAULT_CURATION_IN_FLIGHT,
                bound_scale=cfg.bound_scale,
            )
        except ValueError as err:
            raise ConfigError([f"verify.instances: {err}"])
        write_gap_rows(config.out / VALUE_GAP_CSV, rows)
        for row in rows:
            if not row.holds:
                violations.append(
                    f"value gap: instance {row.instance_seed}: "
                    f"gap {row.gap!r} > bound {row.bound!r}")
            if not row.tv_holds:
                violations.append(
                    f"state TV bound: instance {row.instance_seed}")

        cells = acceptance_bound_grid(
            strategies=cfg.grid_strategies,
            k_values=cfg.k_values,
            tau_values=cfg.tau_values,
            eta=cfg.eta,
            seed=seed,
        )
        write_grid(config.out / GRID_CSV, cells)
        for cell in cells:
            if not cell.holds:
                violations.append(
                    f"acceptance bound: K={cell.k_trials} tau={cell.tau}: "
                    f"mean {cell.mean_q!r} vs bound {cell.bound!r}, "
                    f"bad share {cell.bad_fraction!r} "
                    f"vs {cell.bad_bound!r}")

        reports = [
            lcb_coverage(
                point.m_samples,
                point.epsilon,
                point.a_s,
                cfg.replications,
                seed,
            )
            for point in cfg.coverage
        ]
        write_coverage(config.out / COVERAGE_CSV, reports)
        for report in reports:
            if not report.holds:
                violations.append(
                    f"rate bound coverage: M={report.m_samples}: "
                    f"{report.frequency!r} > {report.bound!r}")

        applicable = sum(1 for cell in cells if cell.applicable)
        self.stdout.write(
            f"value gap: {len(rows)} instances, "
            f"{sum(1 for row in rows if row.holds and row.tv_holds)} hold")
        self.stdout.write(
            f"acceptance grid: {len(cells)} cells ({applicable} applicable), "
            f"{sum(1 for cell in cells if cell.holds)} hold")
        self.stdout.write(
            f"rate bound coverage: {len(reports)} points, "
            f"{sum(1 for report in reports if report.holds)} hold")

        if violations:
            raise VerificationFailed(violations)
        log.info("All checks passed, reports in %s", config.out)
