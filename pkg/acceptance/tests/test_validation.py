from unittest import TestCase

from llm_gateway.exceptions import TransportError
from llm_gateway.scripted import scripted_policy

from ..exceptions import TrialAborted, TrialError
from ..types import Problem, TrialOutcome
from ..validation import run_trials, trial_seeds, validate_strategy


PROBLEM = Problem(id='p1', text='Add 2 and 2.')


class ConstantExecutor:
    deterministic = True

    def __init__(self, success: bool):
        self.success = success

    def run(self, problem, strategy, seed):
        return TrialOutcome(success=self.success)


class FlakyExecutor:
    """Errors on its first ``failures`` calls."""

    def __init__(self, failures: int):
        self.failures = failures
        self.calls = 0

    def run(self, problem, strategy, seed):
        self.calls += 1
        if self.calls <= self.failures:
            raise TrialError("endpoint unavailable")
        return TrialOutcome(success=True)


class DeadEndpointExecutor:
    """Fails like a gateway whose own retries are exhausted."""

    def __init__(self):
        self.calls = 0

    def run(self, problem, strategy, seed):
        self.calls += 1
        raise TransportError("connection refused", attempt_count=5)


class ValidateStrategyTestCase(TestCase):

    def test_constant_executors(self):
        self.assertEqual(validate_strategy(
            ConstantExecutor(True), PROBLEM, 'add', 20, seed=0), 1.0)
        self.assertEqual(validate_strategy(
            ConstantExecutor(False), PROBLEM, 'add', 20, seed=0), 0.0)

    def test_bernoulli_executor(self):
        executor = scripted_policy({'success': {'p1': 0.7}}, seed=11)
        q_hat = validate_strategy(executor, PROBLEM, 'add', 10_000, seed=1)
        self.assertAlmostEqual(q_hat, 0.7, delta=0.02)

    def test_estimate_lies_on_trial_grid(self):
        executor = scripted_policy({'success': {'p1': 0.5}})
        for seed in range(10):
            q_hat = validate_strategy(executor, PROBLEM, 'add', 7, seed)
            self.assertAlmostEqual(q_hat * 7, round(q_hat * 7))

    def test_reproducible(self):
        executor = scripted_policy({'success': {'p1': 0.5}})
        first = validate_strategy(executor, PROBLEM, 'add', 200, seed=4)
        second = validate_strategy(executor, PROBLEM, 'add', 200, seed=4)
        self.assertEqual(first, second)
        self.assertEqual(trial_seeds(4, 'p1', 3), trial_seeds(4, 'p1', 3))
        self.assertNotEqual(trial_seeds(4, 'p1', 3), trial_seeds(4, 'p2', 3))

    def test_errors_are_retried_not_counted(self):
        executor = FlakyExecutor(failures=2)
        q_hat = validate_strategy(
            executor, PROBLEM, 'add', 5, seed=0, retries=2)
        self.assertEqual(q_hat, 1.0)
        self.assertEqual(executor.calls, 7)

    def test_fail_after_persistent_errors(self):
        with self.assertRaises(TrialAborted) as ctx:
            validate_strategy(
                FlakyExecutor(failures=100), PROBLEM, 'add', 5, seed=0)
        self.assertEqual(ctx.exception.problem_id, 'p1')
        self.assertEqual(ctx.exception.trial_index, 0)

    def test_exhausted_gateway_is_not_retried(self):
        executor = DeadEndpointExecutor()
        with self.assertRaises(TrialAborted):
            validate_strategy(executor, PROBLEM, 'add', 5, seed=0)
        self.assertEqual(executor.calls, 1)

    def test_failure_feedback_is_kept(self):
        executor = scripted_policy({
            'success': {'p1': 0.0},
            'feedback': {'p1': 'off by one'},
        })
        result = run_trials(executor, PROBLEM, 'add', 3, seed=0)
        self.assertEqual(result.feedback, 'off by one')
        self.assertEqual(result.successes, 0)

    def test_fail_on_zero_trials(self):
        with self.assertRaises(ValueError):
            validate_strategy(ConstantExecutor(True), PROBLEM, 'add', 0, 0)
