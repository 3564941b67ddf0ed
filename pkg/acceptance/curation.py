"""Curating a supervised corpus by teacher-guided acceptance sampling.

For every problem the teacher proposes a strategy, which is validated
against the core; a strategy below threshold is refined with feedback
and revalidated, a bounded number of times. Every round is recorded;
accepted rounds make up the corpus used to fit the guide.
"""

from typing import (
    Callable,
    Dict,
    List,
    Mapping,
    NamedTuple,
    Optional,
    Sequence,
)
from concurrent.futures import ThreadPoolExecutor, as_completed
from pathlib import Path
import logging

import numpy as np
from django.conf import settings

from common.records import read_jsonl, write_jsonl
from common.rng import derive_seed
from policy_core.types import GuidePolicy
from prometheus import metrics

from .sampling import certify
from .types import (
    AcceptanceCertificate,
    AcceptanceConfig,
    CorpusRecord,
    Executor,
    Problem,
    Teacher,
)
from .validation import run_trials


__all__ = (
    'CurationResult',
    'curate_problem',
    'curate',
    'pass_rate_table',
    'PASS_RATE_CSV_HEADER',
    'read_problems',
    'read_corpus',
    'write_corpus',
    'fit_sft_guide',
)


log = logging.getLogger(__name__)


class CurationResult(NamedTuple):
    corpus: List[CorpusRecord]
    """Records of every round, in problem order."""

    certificate: Optional[AcceptanceCertificate]
    """Computed over first-round decisions;
    ``None`` when no problem was resolved."""

    unresolved: List[str]
    """IDs of problems whose curation failed."""

    @property
    def accepted(self) -> List[CorpusRecord]:
        return [record for record in self.corpus if record.accepted]


def failure_feedback(k_trials: int, q_hat: float) -> str:
    return (
        f"strategy failed {k_trials}-trial validation "
        f"at q_hat={q_hat:.3f}")


def curate_problem(
    teacher: Teacher,
    executor: Executor,
    problem: Problem,
    config: AcceptanceConfig,
    seed: int,
) -> List[CorpusRecord]:
    """Proposes, validates and refines strategies for one problem
    until one is accepted or refinements run out.

    :returns: one record per round
    """
    records: List[CorpusRecord] = []
    strategy = teacher.propose(problem)
    round_ = 0
    while True:
        result = run_trials(
            executor,
            problem,
            strategy,
            config.k_trials,
            derive_seed(seed, problem.id, round_),
            config.trial_retries,
        )
        accepted = result.q_hat >= config.tau
        records.append(CorpusRecord(
            problem_id=problem.id,
            problem_text=problem.text,
            strategy_text=strategy,
            q_hat=result.q_hat,
            refinement_round=round_,
            accepted=accepted,
        ))
        metrics.curation_outcomes.labels(
            str(round_), 'accepted' if accepted else 'rejected').inc()
        log.debug(
            "Problem %s round %s: q_hat=%.3f (%s)",
            problem.id, round_, result.q_hat,
            'accepted' if accepted else 'rejected')

        if accepted or round_ >= config.max_refinements:
            return records

        feedback = result.feedback or failure_feedback(
            config.k_trials, result.q_hat)
        strategy = teacher.refine(problem, strategy, feedback)
        round_ += 1


def curate(
    teacher: Teacher,
    executor: Executor,
    problems: Sequence[Problem],
    config: AcceptanceConfig,
    seed: int,
    completed: Optional[Mapping[str, Sequence[CorpusRecord]]] = None,
    on_problem: Optional[
        Callable[[Problem, List[CorpusRecord]], None]] = None,
) -> CurationResult:
    """Curates all ``problems``, several at a time.

    Output does not depend on scheduling: each problem's trials are
    seeded from ``seed`` and the problem ID, and results are collected
    in problem order.

    :param completed: records from an interrupted run, by problem ID;
        those problems are not curated again
    :param on_problem: called (from the calling thread) as each problem
        finishes, e.g. to persist partial output
    """
    completed = completed or {}
    results: Dict[str, List[CorpusRecord]] = {
        problem_id: list(records)
        for problem_id, records in completed.items()
    }
    unresolved: List[str] = []

    pending = [p for p in problems if p.id not in results]
    if completed:
        log.info(
            "Resuming: %s problems done, %s remaining",
            len(problems) - len(pending), len(pending))

    workers = config.max_in_flight or settings.DEFAULT_CURATION_IN_FLIGHT
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {
            pool.submit(
                curate_problem, teacher, executor, problem, config, seed,
            ): problem
            for problem in pending
        }
        for future in as_completed(futures):
            problem = futures[future]
            try:
                records = future.result()
            except Exception:
                log.exception("Could not curate problem %s", problem.id)
                metrics.curation_outcomes.labels('-', 'unresolved').inc()
                unresolved.append(problem.id)
                continue
            results[problem.id] = records
            if on_problem:
                on_problem(problem, records)

    corpus: List[CorpusRecord] = []
    first_round_flags: List[bool] = []
    for problem in problems:
        records = results.get(problem.id)
        if not records:
            continue
        corpus.extend(records)
        first_round_flags.append(records[0].accepted)

    certificate = (
        certify(first_round_flags, config) if first_round_flags else None)
    ordered_unresolved = [p.id for p in problems if p.id in unresolved]
    return CurationResult(corpus, certificate, ordered_unresolved)


PASS_RATE_CSV_HEADER = (
    'refinement_round',
    'accepted',
    'cumulative_accepted',
    'cumulative_rate',
)


def pass_rate_table(
    corpus: Sequence[CorpusRecord],
    max_refinements: int,
) -> List[tuple]:
    """Acceptances per refinement round, and the cumulative share
    of resolved problems accepted by each round."""
    problem_count = len({record.problem_id for record in corpus})
    rounds = max(
        [max_refinements] + [r.refinement_round for r in corpus])
    per_round = [0] * (rounds + 1)
    for record in corpus:
        if record.accepted:
            per_round[record.refinement_round] += 1
    rows = []
    cumulative = 0
    for round_, accepted in enumerate(per_round):
        cumulative += accepted
        rate = cumulative / problem_count if problem_count else 0.0
        rows.append((round_, accepted, cumulative, rate))
    return rows


def read_problems(path: Path) -> List[Problem]:
    """Reads a problem file, one record per line.

    :raises pydantic.ValidationError:
    :raises ValueError: duplicate problem IDs
    """
    problems = [Problem(**record) for record in read_jsonl(path)]
    ids = [problem.id for problem in problems]
    if len(set(ids)) != len(ids):
        raise ValueError(f"{path} has duplicate problem IDs")
    return problems


def read_corpus(path: Path) -> Dict[str, List[CorpusRecord]]:
    """Reads corpus records by problem ID, e.g. to resume a run."""
    by_problem: Dict[str, List[CorpusRecord]] = {}
    for record in read_jsonl(path):
        parsed = CorpusRecord(**record)
        by_problem.setdefault(parsed.problem_id, []).append(parsed)
    return by_problem


def write_corpus(path: Path, corpus: Sequence[CorpusRecord]) -> int:
    return write_jsonl(path, [record.to_record() for record in corpus])


def fit_sft_guide(
    corpus: Sequence[CorpusRecord],
    problem_ids: Sequence[str],
    strategy_space: Sequence[str],
    smoothing: float = 1.0,
) -> GuidePolicy:
    """Tabular guide fitted to accepted (problem, strategy) pairs.

    Rows are smoothed maximum-likelihood estimates over
    ``strategy_space``; problems without an accepted pair
    get a uniform row. Accepted strategies outside the space
    are ignored.

    :raises ValueError: negative smoothing, or an empty strategy space
    """
    if smoothing < 0:
        raise ValueError("smoothing must be non-negative")
    if not strategy_space:
        raise ValueError("strategy space is empty")
    columns = {text: idx for idx, text in enumerate(strategy_space)}
    rows = {problem_id: idx for idx, problem_id in enumerate(problem_ids)}

    counts = np.zeros((len(problem_ids), len(strategy_space)))
    for record in corpus:
        if not record.accepted or record.problem_id not in rows:
            continue
        column = columns.get(record.strategy_text)
        if column is None:
            log.debug(
                "Accepted strategy for %s is outside the strategy space",
                record.problem_id)
            continue
        counts[rows[record.problem_id], column] += 1

    table = np.full_like(counts, 1 / len(strategy_space))
    seen = counts.sum(axis=1) > 0
    smoothed = counts[seen] + smoothing
    table[seen] = smoothed / smoothed.sum(axis=1, keepdims=True)
    return GuidePolicy.tabular(table, strategy_space)
