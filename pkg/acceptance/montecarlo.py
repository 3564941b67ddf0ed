"""Monte-Carlo checks of the acceptance-sampling guarantees.

- :func:`.acceptance_bound_grid` simulates K-trial acceptance over
  a large pool of strategies with Beta-distributed success rates and
  compares the empirical mean success of accepted strategies
  (and their share of bad strategies) with the bounds.
- :func:`.lcb_coverage` measures how often the acceptance-rate lower
  confidence bound overshoots the true rate.
"""

from typing import Iterable, List, NamedTuple, Optional, Sequence
from pathlib import Path
import logging
import math

import numpy as np

from common.records import write_csv
from common.rng import make_rng
from prometheus import metrics

from .sampling import accepted_success_lower_bound, hoeffding_delta


__all__ = (
    'SIGMA_MULTIPLE',
    'GridCell',
    'acceptance_bound_grid',
    'GRID_CSV_HEADER',
    'write_grid',
    'CoverageReport',
    'lcb_coverage',
    'COVERAGE_CSV_HEADER',
    'write_coverage',
)


log = logging.getLogger(__name__)


SIGMA_MULTIPLE = 3
"""Sampling error allowed, in standard errors."""


class GridCell(NamedTuple):
    k_trials: int
    tau: float
    eta: float
    delta: float
    a_hat: float
    accepted_count: int

    applicable: bool
    """δ < Â, so that the bound says something."""

    mean_q: Optional[float]
    std_error: Optional[float]
    bound: Optional[float]

    bad_fraction: Optional[float]
    """Share of accepted strategies with true success ≤ τ − η."""

    bad_bound: Optional[float]
    """δ / Â."""

    holds: bool


def _grid_cell(
    q: np.ndarray,
    rng: np.random.Generator,
    k_trials: int,
    tau: float,
    eta: float,
) -> GridCell:
    successes = rng.binomial(k_trials, q)
    accepted = successes / k_trials >= tau
    accepted_q = q[accepted]
    count = int(accepted.sum())
    a_hat = count / q.size
    delta = hoeffding_delta(k_trials, eta)

    if count < 2 or delta >= a_hat:
        return GridCell(
            k_trials, tau, eta, delta, a_hat, count,
            applicable=False,
            mean_q=float(accepted_q.mean()) if count else None,
            std_error=None,
            bound=None,
            bad_fraction=None,
            bad_bound=None,
            holds=True,
        )

    mean_q = float(accepted_q.mean())
    std_error = float(accepted_q.std(ddof=1) / math.sqrt(count))
    bound = accepted_success_lower_bound(tau, eta, k_trials, a_hat)
    mean_holds = mean_q - SIGMA_MULTIPLE * std_error >= bound

    bad_fraction = float(np.mean(accepted_q <= tau - eta))
    bad_bound = delta / a_hat
    p = min(bad_bound, 1.0)
    bad_slack = SIGMA_MULTIPLE * math.sqrt(p * (1 - p) / count)
    bad_holds = bad_fraction <= bad_bound + bad_slack

    return GridCell(
        k_trials, tau, eta, delta, a_hat, count,
        applicable=True,
        mean_q=mean_q,
        std_error=std_error,
        bound=bound,
        bad_fraction=bad_fraction,
        bad_bound=bad_bound,
        holds=mean_holds and bad_holds,
    )


def acceptance_bound_grid(
    strategies: int = 10_000,
    k_values: Sequence[int] = (10, 50, 200),
    tau_values: Sequence[float] = (0.5, 0.8),
    eta: float = 0.05,
    beta_a: float = 2.0,
    beta_b: float = 2.0,
    seed: int = 0,
) -> List[GridCell]:
    """Simulates acceptance over ``strategies`` strategies whose success
    rates are drawn from ``Beta(beta_a, beta_b)``, for every combination
    of K and τ.

    Cells where δ ≥ Â are reported as not applicable and hold trivially.
    """
    if strategies < 2:
        raise ValueError("At least two strategies are required")
    cells = []
    for k_trials in k_values:
        for tau in tau_values:
            rng = make_rng(seed, 'acceptance-grid', k_trials, repr(tau))
            q = rng.beta(beta_a, beta_b, size=strategies)
            cell = _grid_cell(q, rng, k_trials, tau, eta)
            if not cell.holds:
                metrics.verification_violations.labels(
                    'acceptance_bound').inc()
                log.warning("Acceptance bound violated: %s", cell)
            cells.append(cell)
    return cells


GRID_CSV_HEADER = GridCell._fields


def _blank_none(row: Iterable) -> List:
    return [
        '' if cell is None
        else str(cell).lower() if isinstance(cell, bool)
        else cell
        for cell in row
    ]


def write_grid(path: Path, cells: Sequence[GridCell]) -> int:
    return write_csv(path, GRID_CSV_HEADER, map(_blank_none, cells))


class CoverageReport(NamedTuple):
    m_samples: int
    epsilon: float
    a_s: float
    replications: int

    frequency: float
    """How often the lower bound exceeded the true rate."""

    bound: float
    """``exp(−2Mε²)``."""

    slack: float
    """Allowed binomial sampling error."""

    holds: bool


def lcb_coverage(
    m_samples: int,
    epsilon: float,
    a_s: float,
    replications: int = 10_000,
    seed: int = 0,
) -> CoverageReport:
    """Replicates M Bernoulli(``a_s``) acceptance decisions and counts
    how often ``max(â − ε, 0)`` exceeds ``a_s``.
    """
    if m_samples < 1 or replications < 1:
        raise ValueError("m_samples and replications must be positive")
    if not 0 <= a_s <= 1:
        raise ValueError("a_s must be a probability")
    rng = make_rng(seed, 'lcb-coverage', m_samples)
    a_hat = rng.binomial(m_samples, a_s, size=replications) / m_samples
    a_lcb = np.maximum(a_hat - epsilon, 0.0)
    frequency = float(np.mean(a_s < a_lcb))
    bound = math.exp(-2 * m_samples * epsilon ** 2)
    p = min(bound, 1.0)
    slack = SIGMA_MULTIPLE * math.sqrt(p * (1 - p) / replications)
    holds = frequency <= bound + slack
    if not holds:
        metrics.verification_violations.labels('lcb_coverage').inc()
        log.warning(
            "Acceptance-rate bound overshoots too often: %s > %s + %s",
            frequency, bound, slack)
    return CoverageReport(
        m_samples, epsilon, a_s, replications,
        frequency, bound, slack, holds)


COVERAGE_CSV_HEADER = CoverageReport._fields


def write_coverage(path: Path, reports: Sequence[CoverageReport]) -> int:
    return write_csv(path, COVERAGE_CSV_HEADER, map(_blank_none, reports))
