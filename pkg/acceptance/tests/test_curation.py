from math import comb, sqrt
from pathlib import Path
from tempfile import TemporaryDirectory
from unittest import TestCase

import numpy as np

from common.records import write_jsonl
from llm_gateway.scripted import scripted_policy

from ..curation import (
    curate,
    fit_sft_guide,
    pass_rate_table,
    read_corpus,
    read_problems,
    write_corpus,
)
from ..types import AcceptanceConfig, CorpusRecord, Problem


def problems(count: int):
    return [Problem(id=f'p{idx}', text=f'Problem {idx}')
            for idx in range(count)]


def laddered_script(start=0.3, gain=0.2):
    """Each refinement raises the true success rate by ``gain``."""

    def rung(strategy: str) -> int:
        return int(strategy.rsplit('/s', 1)[1])

    return {
        'propose': lambda problem: f'{problem.id}/s0',
        'refine': lambda problem, strategy, feedback:
            f'{problem.id}/s{rung(strategy) + 1}',
        'success': lambda problem, strategy:
            min(start + gain * rung(strategy), 1.0),
    }


def pass_probability(q: float, k_trials: int, tau: float) -> float:
    threshold = next(s for s in range(k_trials + 1) if s / k_trials >= tau)
    return sum(
        comb(k_trials, s) * q ** s * (1 - q) ** (k_trials - s)
        for s in range(threshold, k_trials + 1))


class CurateTestCase(TestCase):

    def test_always_successful_executor(self):
        policy = scripted_policy({
            'propose': lambda problem: 'try small cases',
            'success': lambda problem, strategy: 1.0,
        })
        result = curate(
            policy, policy, problems(5), AcceptanceConfig(k_trials=10),
            seed=0)
        self.assertEqual(len(result.corpus), 5)
        self.assertTrue(all(r.accepted for r in result.corpus))
        self.assertTrue(all(r.refinement_round == 0 for r in result.corpus))
        self.assertEqual(result.certificate.a_hat, 1.0)
        self.assertEqual(result.unresolved, [])

    def test_closed_loop(self):
        policy = scripted_policy({
            'propose': {'p0': 'works', 'p1': 'breaks'},
            'success': {'p0': {'works': 1.0}, 'p1': {'breaks': 0.0}},
        })
        result = curate(
            policy, policy, problems(2),
            AcceptanceConfig(k_trials=10, max_refinements=0), seed=0)
        self.assertEqual(
            [(r.problem_id, r.accepted) for r in result.corpus],
            [('p0', True), ('p1', False)])
        self.assertEqual(result.certificate.a_hat, 0.5)

    def test_refinement_receives_feedback(self):
        received = []

        def refine(problem, strategy, feedback):
            received.append(feedback)
            return 'better'

        policy = scripted_policy({
            'propose': lambda problem: 'vague',
            'refine': refine,
            'success': {'p0': {'vague': 0.0, 'better': 1.0}},
        })
        result = curate(
            policy, policy, problems(1),
            AcceptanceConfig(k_trials=10, max_refinements=2), seed=0)
        self.assertEqual(
            received, ['strategy failed 10-trial validation at q_hat=0.000'])
        self.assertEqual(
            [(r.strategy_text, r.accepted) for r in result.corpus],
            [('vague', False), ('better', True)])
        self.assertEqual(result.accepted[0].refinement_round, 1)

    def test_accepted_records_meet_threshold(self):
        config = AcceptanceConfig(k_trials=20, tau=0.6, max_refinements=3)
        policy = scripted_policy(laddered_script())
        result = curate(policy, policy, problems(50), config, seed=2)
        for record in result.corpus:
            self.assertEqual(record.accepted, record.q_hat >= config.tau)
            self.assertLessEqual(
                record.refinement_round, config.max_refinements)

    def test_refinement_trend(self):
        config = AcceptanceConfig(
            k_trials=50, tau=0.7, max_refinements=3, max_in_flight=8)
        count = 2000
        policy = scripted_policy(laddered_script(), seed=3)
        result = curate(policy, policy, problems(count), config, seed=3)

        table = pass_rate_table(result.corpus, config.max_refinements)
        rates = [row[3] for row in table]
        self.assertTrue(all(a < b for a, b in zip(rates, rates[1:])))

        # Compare with the analytic chance of first acceptance per round
        remaining = 1.0
        for round_, accepted, _, _ in table:
            p = pass_probability(0.3 + 0.2 * round_, 50, 0.7)
            expected = remaining * p
            remaining *= 1 - p
            sigma = sqrt(count * expected * (1 - expected))
            self.assertLessEqual(
                abs(accepted - count * expected), 4 * sigma + 1)
        self.assertEqual(
            max(range(4), key=lambda r: table[r][1]), 2)

    def test_certificate_uses_first_round_only(self):
        policy = scripted_policy(laddered_script(start=0.0, gain=1.0))
        result = curate(
            policy, policy, problems(10),
            AcceptanceConfig(k_trials=10, max_refinements=1), seed=0)
        self.assertTrue(all(r.accepted for r in result.accepted))
        self.assertEqual(len(result.accepted), 10)
        self.assertEqual(result.certificate.a_hat, 0.0)
        self.assertEqual(result.certificate.m_samples, 10)

    def test_failed_problems_are_unresolved(self):
        policy = scripted_policy({
            'propose': {'p0': 'fine', 'p2': 'fine'},
            'success': lambda problem, strategy: 1.0,
        })
        result = curate(
            policy, policy, problems(3), AcceptanceConfig(k_trials=5),
            seed=0)
        self.assertEqual(result.unresolved, ['p1'])
        self.assertEqual(
            [r.problem_id for r in result.corpus], ['p0', 'p2'])
        self.assertEqual(result.certificate.m_samples, 2)

    def test_independent_of_concurrency(self):
        policy = scripted_policy(laddered_script(), seed=9)
        outputs = []
        for workers in (1, 8):
            config = AcceptanceConfig(k_trials=20, max_in_flight=workers)
            result = curate(policy, policy, problems(40), config, seed=9)
            outputs.append([r.to_record() for r in result.corpus])
        self.assertEqual(outputs[0], outputs[1])

    def test_resume(self):
        proposed = []

        def propose(problem):
            proposed.append(problem.id)
            return f'{problem.id}/s0'

        script = {**laddered_script(), 'propose': propose}
        policy = scripted_policy(script, seed=1)
        config = AcceptanceConfig(k_trials=20, max_in_flight=1)
        everything = problems(6)

        full = curate(policy, policy, everything, config, seed=1)
        partial = curate(policy, policy, everything[:4], config, seed=1)
        completed = {}
        for record in partial.corpus:
            completed.setdefault(record.problem_id, []).append(record)

        proposed.clear()
        resumed = curate(
            policy, policy, everything, config, seed=1,
            completed=completed)
        self.assertEqual(sorted(proposed), ['p4', 'p5'])
        self.assertEqual(resumed.corpus, full.corpus)
        self.assertEqual(resumed.certificate, full.certificate)

    def test_script_miss_is_reported(self):
        policy = scripted_policy({'propose': {}})
        with self.assertLogs('acceptance.curation', level='ERROR'):
            result = curate(
                policy, policy, problems(1), AcceptanceConfig(), seed=0)
        self.assertEqual(result.unresolved, ['p0'])
        self.assertIsNone(result.certificate)


class CorpusFilesTestCase(TestCase):

    def test_round_trip(self):
        corpus = [
            CorpusRecord(
                problem_id='p0', problem_text='Problem 0',
                strategy_text='vague', q_hat=0.2,
                refinement_round=0, accepted=False),
            CorpusRecord(
                problem_id='p0', problem_text='Problem 0',
                strategy_text='1. split\n2. merge', q_hat=0.9,
                refinement_round=1, accepted=True),
        ]
        with TemporaryDirectory() as tmp:
            path = Path(tmp) / 'corpus.jsonl'
            write_corpus(path, corpus)
            self.assertEqual(read_corpus(path), {'p0': corpus})

    def test_read_problems(self):
        with TemporaryDirectory() as tmp:
            path = Path(tmp) / 'problems.jsonl'
            write_jsonl(path, [
                {'id': 'gsm-1', 'text': 'What is 6 * 7?',
                 'validator': {'kind': 'boxed', 'expected': '42'}},
                {'id': 'code-1', 'text': 'Reverse a list.', 'domain': 'code'},
            ])
            loaded = read_problems(path)
            self.assertEqual([p.id for p in loaded], ['gsm-1', 'code-1'])
            self.assertTrue(loaded[0].validator.check(r'so \boxed{42}'))

            write_jsonl(path, [{'id': 'a', 'text': 'x'}] * 2)
            with self.assertRaises(ValueError):
                read_problems(path)


class FitSFTGuideTestCase(TestCase):

    def test_rows(self):
        def record(problem_id, strategy, accepted=True):
            return CorpusRecord(
                problem_id=problem_id, problem_text='', q_hat=1.0,
                strategy_text=strategy, refinement_round=0,
                accepted=accepted)

        corpus = [
            record('p0', 'a'),
            record('p0', 'a'),
            record('p0', 'b'),
            record('p1', 'c', accepted=False),
            record('p1', 'unknown'),
        ]
        guide = fit_sft_guide(
            corpus, ['p0', 'p1'], ['a', 'b', 'c'], smoothing=1.0)
        np.testing.assert_allclose(
            guide.probabilities,
            [[3 / 6, 2 / 6, 1 / 6], [1 / 3, 1 / 3, 1 / 3]])
        self.assertEqual(guide.strategy_space, ('a', 'b', 'c'))

    def test_without_smoothing(self):
        corpus = [CorpusRecord(
            problem_id='p0', problem_text='', strategy_text='b', q_hat=1.0,
            refinement_round=0, accepted=True)]
        guide = fit_sft_guide(corpus, ['p0'], ['a', 'b'], smoothing=0)
        np.testing.assert_array_equal(guide.probabilities, [[0.0, 1.0]])
