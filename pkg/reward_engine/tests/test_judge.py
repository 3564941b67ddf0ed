from unittest import TestCase

from acceptance.types import Problem
from llm_gateway.gateway import Gateway
from llm_gateway.scripted import ScriptedEndpoint, scripted_policy

from ..exceptions import JudgeUnavailable
from ..judge import GatewayJudge, RuleBasedJudge, judge_score


PROBLEM = Problem(id='gsm-7', text='How many apples are left?')

FOUR_STEPS = (
    "1. Note how many apples there are.\n"
    "2. Subtract the ones eaten.\n"
    "3. Subtract the ones given away.\n"
    "4. Report what remains."
)


class UnavailableJudge:

    def judge(self, problem, strategy_body):
        raise JudgeUnavailable("offline")


class RuleBasedJudgeTestCase(TestCase):

    judge = RuleBasedJudge()

    def test_enumerated_steps(self):
        self.assertAlmostEqual(
            judge_score(self.judge, PROBLEM, FOUR_STEPS), 0.8)
        self.assertAlmostEqual(
            judge_score(self.judge, PROBLEM, "1. add 2. halve 3. round"),
            0.6)
        self.assertEqual(
            judge_score(self.judge, PROBLEM, "think about it"), 0.0)

    def test_score_is_capped(self):
        body = "\n".join(f"{idx}. step" for idx in range(1, 9))
        self.assertEqual(judge_score(self.judge, PROBLEM, body), 1.0)

    def test_leaks_score_zero(self):
        for body in (
            FOUR_STEPS + "\n```python\nprint(7)\n```",
            FOUR_STEPS + "\nSo the answer is \\boxed{7}.",
            FOUR_STEPS + "\n7",
        ):
            with self.subTest(body=body[-20:]):
                self.assertTrue(self.judge.judge(PROBLEM, body).leaked)
                self.assertEqual(judge_score(self.judge, PROBLEM, body), 0.0)

    def test_decimal_in_text_is_not_a_step(self):
        verdict = self.judge.judge(PROBLEM, "scale by 3.5 then round")
        self.assertEqual(verdict.score, 0.0)
        self.assertFalse(verdict.leaked)


class JudgeScoreTestCase(TestCase):

    def test_disabled_judge(self):
        self.assertEqual(judge_score(None, PROBLEM, FOUR_STEPS), 0.0)

    def test_unavailable_judge_fallbacks(self):
        with self.assertLogs('reward_engine.judge', level='WARNING'):
            self.assertEqual(
                judge_score(UnavailableJudge(), PROBLEM, FOUR_STEPS), 0.0)
        with self.assertRaises(JudgeUnavailable):
            judge_score(UnavailableJudge(), PROBLEM, FOUR_STEPS, 'fail')

    def test_scripted_judge_flags_fences(self):
        judge = scripted_policy({
            'judge': {'score': 0.9, 'leak_markers': ['```']},
        })
        self.assertEqual(judge_score(judge, PROBLEM, FOUR_STEPS), 0.9)
        self.assertEqual(
            judge_score(judge, PROBLEM, "```python\npass\n```"), 0.0)


class GatewayJudgeTestCase(TestCase):

    def judge(self, reply: str) -> GatewayJudge:
        endpoint = ScriptedEndpoint(lambda request: reply)
        gateway = Gateway(endpoint, max_in_flight=1, retry_base_ms=1)
        return GatewayJudge(gateway, 'judge-model')

    def test_parses_reply(self):
        verdict = self.judge("SCORE: 0.75\nLEAK: no").judge(
            PROBLEM, FOUR_STEPS)
        self.assertEqual(verdict.score, 0.75)
        self.assertFalse(verdict.leaked)

    def test_leak_flag(self):
        judge = self.judge("score: 1\nleak: YES")
        self.assertTrue(judge.judge(PROBLEM, FOUR_STEPS).leaked)
        self.assertEqual(judge_score(judge, PROBLEM, FOUR_STEPS), 0.0)

    def test_fail_on_reply_without_score(self):
        with self.assertRaises(JudgeUnavailable):
            self.judge("Looks fine to me.").judge(PROBLEM, FOUR_STEPS)
