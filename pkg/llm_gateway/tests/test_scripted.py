from pathlib import Path
from tempfile import TemporaryDirectory
from unittest import TestCase

from acceptance.types import Problem

from ..exceptions import ScriptMiss
from ..scripted import load_script, scripted_policy
from ..templates import PromptNotFound, load_prompt


PROBLEM = Problem(id='p1', text='Add 2 and 2.')


SCRIPT = {
    'propose': {'p1': 'add the numbers'},
    'refine': {'add the numbers': '1. read both numbers 2. add them'},
    'success': {
        'p1': {
            'add the numbers': 0.5,
            '1. read both numbers 2. add them': 1.0,
            '': 0.0,
        },
    },
    'feedback': {'p1': 'forgot to carry'},
    'judge': {'score': 0.6, 'leak_markers': ['```']},
}


class ScriptedPolicyTestCase(TestCase):

    def test_roles(self):
        policy = scripted_policy(SCRIPT, seed=1)
        strategy = policy.propose(PROBLEM)
        self.assertEqual(strategy, 'add the numbers')
        refined = policy.refine(PROBLEM, strategy, 'failed')
        self.assertTrue(policy.run(PROBLEM, refined, seed=0).success)
        outcome = policy.run(PROBLEM, None, seed=0)
        self.assertFalse(outcome.success)
        self.assertEqual(outcome.reward, 0.0)
        self.assertEqual(outcome.feedback, 'forgot to carry')

    def test_outcomes_are_reproducible(self):
        first = scripted_policy(SCRIPT, seed=5)
        second = scripted_policy(SCRIPT, seed=5)
        runs = [
            (first.run(PROBLEM, 'add the numbers', seed).success,
             second.run(PROBLEM, 'add the numbers', seed).success)
            for seed in range(200)
        ]
        self.assertTrue(all(a == b for a, b in runs))
        successes = sum(a for a, _ in runs)
        self.assertGreater(successes, 60)
        self.assertLess(successes, 140)

    def test_judge_flags_leaks(self):
        policy = scripted_policy(SCRIPT)
        clean = policy.judge(PROBLEM, '1. add\n2. report')
        self.assertEqual(clean.score, 0.6)
        self.assertFalse(clean.leaked)
        leaky = policy.judge(PROBLEM, '```python\nprint(4)\n```')
        self.assertTrue(leaky.leaked)

    def test_callable_sections(self):
        policy = scripted_policy({
            'propose': lambda problem: f'solve {problem.id}',
            'success': lambda problem, strategy: 1.0 if strategy else 0.0,
            'judge': lambda problem, body: (2.0, False),
        })
        self.assertEqual(policy.propose(PROBLEM), 'solve p1')
        self.assertTrue(policy.run(PROBLEM, 'x', 0).success)
        self.assertEqual(policy.judge(PROBLEM, 'x').score, 1.0)

    def test_fail_on_missing_key(self):
        policy = scripted_policy(SCRIPT)
        other = Problem(id='p2', text='Unscripted.')
        with self.assertRaises(ScriptMiss) as ctx:
            policy.propose(other)
        self.assertEqual(ctx.exception.role, 'propose')
        with self.assertRaises(ScriptMiss):
            policy.run(PROBLEM, 'unknown strategy', 0)
        with self.assertRaises(ScriptMiss):
            scripted_policy({}).judge(PROBLEM, 'x')

    def test_load_script(self):
        with TemporaryDirectory() as tmp:
            path = Path(tmp) / 'script.yaml'
            path.write_text(
                "propose:\n  p1: add the numbers\n"
                "success:\n  p1: 1.0\n",
                encoding='utf-8')
            policy = scripted_policy(load_script(path))
        self.assertEqual(policy.propose(PROBLEM), 'add the numbers')
        self.assertTrue(policy.run(PROBLEM, 'anything', 3).success)


class PromptTemplateTestCase(TestCase):

    def test_shipped_templates_render(self):
        for name in ('propose', 'guided_math', 'guided_code', 'judge',
                     'unguided_math', 'unguided_code'):
            with self.subTest(name=name):
                system, user = load_prompt(name).render(
                    problem='Add 2 and 2.', strategy='1. add')
                self.assertTrue(system)
                self.assertIn('Add 2 and 2.', user)

    def test_fail_on_missing_placeholder(self):
        with self.assertRaises(ValueError):
            load_prompt('refine').render(problem='x', strategy='y')

    def test_fail_on_unknown_template(self):
        with self.assertRaises(PromptNotFound):
            load_prompt('haiku')
