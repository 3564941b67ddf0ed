from unittest import TestCase

import numpy as np
from pydantic import ValidationError

from common.rng import make_rng

from ..composition import compose
from ..exceptions import NotTabular, StrategySpaceMismatch
from ..types import CorePolicy, GuidePolicy


def random_rows(rng, shape):
    rows = rng.dirichlet(np.ones(shape[-1]), size=shape[:-1])
    return rows / rows.sum(axis=-1, keepdims=True)


class ComposeTestCase(TestCase):

    def test_single_strategy_collapse(self):
        rng = make_rng(7)
        core = CorePolicy.tabular(random_rows(rng, (4, 3, 2)))
        guide = GuidePolicy.tabular([[1.0, 0.0, 0.0]] * 4)
        composed = compose(guide, core)
        np.testing.assert_allclose(
            composed.probabilities,
            core.probabilities[:, 0, :],
            atol=1e-15)

    def test_uniform_guide_over_opposite_strategies(self):
        core = CorePolicy.tabular([[[1.0, 0.0], [0.0, 1.0]]])
        guide = GuidePolicy.tabular([[0.5, 0.5]])
        composed = compose(guide, core)
        self.assertAlmostEqual(composed.probabilities[0, 0], 0.5, places=15)
        self.assertAlmostEqual(composed.probabilities[0, 1], 0.5, places=15)

    def test_matches_brute_force_summation(self):
        rng = make_rng(11)
        guide_probs = random_rows(rng, (5, 3))
        core_probs = random_rows(rng, (5, 3, 4))
        composed = compose(
            GuidePolicy.tabular(guide_probs),
            CorePolicy.tabular(core_probs))

        for s in range(5):
            for a in range(4):
                expected = 0.0
                for z in range(3):
                    expected += guide_probs[s, z] * core_probs[s, z, a]
                self.assertAlmostEqual(
                    composed.probabilities[s, a], expected, places=12)

    def test_rows_are_distributions(self):
        for seed in range(20):
            rng = make_rng(seed)
            composed = compose(
                GuidePolicy.tabular(random_rows(rng, (6, 5))),
                CorePolicy.tabular(random_rows(rng, (6, 5, 4))))
            np.testing.assert_allclose(
                composed.probabilities.sum(axis=1), 1.0, atol=1e-12)

    def test_composed_policy_keeps_provenance(self):
        guide = GuidePolicy.tabular([[0.25, 0.75]], ('short', 'long'))
        core = CorePolicy.tabular([[[1.0], [1.0]]], ('short', 'long'))
        composed = compose(guide, core)
        self.assertEqual(composed.strategy_space, ('short', 'long'))
        self.assertIs(composed.guide, guide)
        self.assertIs(composed.core, core)

    def test_fail_on_strategy_space_mismatch(self):
        guide = GuidePolicy.tabular([[0.5, 0.5]], ('a', 'b'))
        core = CorePolicy.tabular([[[1.0], [1.0]]], ('a', 'c'))
        with self.assertRaises(StrategySpaceMismatch) as ctx:
            compose(guide, core)
        self.assertEqual(ctx.exception.left, ('a', 'b'))
        self.assertEqual(ctx.exception.right, ('a', 'c'))

    def test_fail_on_external_policy(self):
        guide = GuidePolicy.external(endpoint=object())
        core = CorePolicy.tabular([[[1.0]]])
        with self.assertRaises(NotTabular):
            compose(guide, core)


class DistributionCheckTestCase(TestCase):

    def test_fail_on_unnormalized_guide_row(self):
        with self.assertRaises(ValidationError):
            GuidePolicy.tabular([[0.5, 0.4]])

    def test_fail_on_negative_core_entry(self):
        with self.assertRaises(ValidationError):
            CorePolicy.tabular([[[1.5, -0.5]]])

    def test_tables_are_read_only(self):
        guide = GuidePolicy.tabular([[0.5, 0.5]])
        with self.assertRaises(ValueError):
            guide.probabilities[0, 0] = 1.0  # type: ignore
