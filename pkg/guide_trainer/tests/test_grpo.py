from unittest import TestCase

import numpy as np
from hypothesis import given, strategies as st

from common.rng import make_rng

from ..exceptions import GroupTooSmall, NonFiniteGradient
from ..grpo import group_advantage, grpo_step, reverse_kl, sample_groups
from ..types import TabularGuideParams, TrainConfig


def two_strategy_params(logits=(0.0, 0.0), reference=(0.0, 0.0)):
    return TabularGuideParams(
        logits=[list(logits)],
        reference_logits=[list(reference)],
        strategy_space=('z_bad', 'z_good'),
    )


class GroupAdvantageTestCase(TestCase):

    def test_equal_rewards(self):
        self.assertEqual(group_advantage([0.4] * 8).tolist(), [0.0] * 8)

    def test_pair(self):
        np.testing.assert_allclose(
            group_advantage([0.0, 1.0]), [-1.0, 1.0], atol=1e-6)

    def test_fail_on_single_reward(self):
        with self.assertRaises(GroupTooSmall):
            group_advantage([1.0])

    @given(st.lists(
        st.integers(-1000, 1000).map(lambda n: n / 100),
        min_size=2, max_size=16))
    def test_standardized(self, rewards):
        advantages = group_advantage(rewards)
        self.assertAlmostEqual(float(advantages.mean()), 0.0, places=9)
        if np.std(rewards) > 0:
            self.assertAlmostEqual(float(advantages.std()), 1.0, places=4)


class GRPOStepTestCase(TestCase):

    def test_no_signal_no_change(self):
        params = two_strategy_params(logits=(0.3, -0.2))
        updated = grpo_step(
            params,
            [[0, 1, 1, 0]],
            [[0.5, 0.5, 0.5, 0.5]],
            TrainConfig(kl_coefficient=0.0))
        np.testing.assert_array_equal(updated.logits, params.logits)

    def test_good_strategy_gains_mass(self):
        params = two_strategy_params()
        updated = grpo_step(
            params,
            [[0, 1, 0, 1]],
            [[0.0, 1.0, 0.0, 1.0]],
            TrainConfig())
        self.assertGreater(
            updated.probabilities()[0, 1], params.probabilities()[0, 1])

    def test_kl_pulls_towards_reference(self):
        params = two_strategy_params(logits=(2.0, 0.0))
        updated = grpo_step(
            params,
            [[0, 0]],
            [[1.0, 1.0]],
            TrainConfig(kl_coefficient=1.0, learning_rate=0.5))

        def kl(p):
            return reverse_kl(
                p.probabilities(), p.reference_probabilities())[0]

        self.assertLess(kl(updated), kl(params))
        np.testing.assert_array_equal(
            updated.reference_logits, params.reference_logits)

    def test_fail_on_non_finite_rewards(self):
        with self.assertRaises(NonFiniteGradient) as ctx:
            grpo_step(
                two_strategy_params(),
                [[0, 1]],
                [[0.0, float('nan')]],
                TrainConfig(),
                step=7)
        self.assertEqual(ctx.exception.step, 7)
        self.assertEqual(ctx.exception.state, 0)

    def test_fail_on_shape_mismatch(self):
        with self.assertRaises(ValueError):
            grpo_step(
                two_strategy_params(), [[0, 1]], [[0.0]], TrainConfig())


class SamplingTestCase(TestCase):

    def test_frequencies(self):
        probs = np.array([[0.1, 0.6, 0.3], [1.0, 0.0, 0.0]])
        samples = sample_groups(probs, 10_000, make_rng(3, 'test'))
        self.assertEqual(samples.shape, (2, 10_000))
        frequencies = np.bincount(samples[0], minlength=3) / 10_000
        np.testing.assert_allclose(frequencies, probs[0], atol=0.02)
        self.assertTrue(np.all(samples[1] == 0))

    def test_reverse_kl(self):
        p = np.array([[0.5, 0.5], [1.0, 0.0]])
        self.assertEqual(reverse_kl(p, p).tolist(), [0.0, 0.0])
        self.assertAlmostEqual(
            reverse_kl(np.array([[1.0, 0.0]]), np.array([[0.5, 0.5]]))[0],
            np.log(2))
