from pathlib import Path
from tempfile import TemporaryDirectory

import yaml
from django.conf import settings
from django.test import SimpleTestCase

from ..config import (
    EFFECTIVE_CONFIG_NAME,
    RunConfig,
    load_run_config,
    nested_overrides,
    write_effective_config,
)
from ..exceptions import ConfigError


class RunConfigTestCase(SimpleTestCase):

    def setUp(self):
        self.tmp = TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def write(self, name: str, data) -> Path:
        path = self.dir / name
        with open(path, 'w', encoding='utf-8') as fh:
            yaml.safe_dump(data, fh)
        return path

    def test_defaults(self):
        config = load_run_config()
        self.assertIsNone(config.seed)
        self.assertEqual(config.lam, 1e-4)
        self.assertEqual(config.acceptance.k_trials, 50)
        self.assertIsNone(config.judge)
        self.assertEqual(
            config.curate.budget, settings.DEFAULT_STRATEGY_TOKEN_BUDGET)

    def test_flags_override_file_values(self):
        path = self.write('run.yaml', {
            'seed': 1,
            'lambda': 0.01,
            'acceptance': {'k_trials': 20, 'tau': 0.6},
        })
        config = load_run_config(path, nested_overrides({
            ('seed', ): 7,
            ('acceptance', 'tau'): 0.8,
            ('acceptance', 'eta'): None,
        }))
        self.assertEqual(config.seed, 7)
        self.assertEqual(config.lam, 0.01)
        self.assertEqual(config.acceptance.k_trials, 20)
        self.assertEqual(config.acceptance.tau, 0.8)
        self.assertEqual(config.acceptance.eta, 0.05)

    def test_list_overrides_replace(self):
        path = self.write('run.yaml', {
            'verify': {'k_values': [10, 50]},
        })
        config = load_run_config(path, {'verify': {'k_values': [200]}})
        self.assertEqual(config.verify.k_values, (200, ))

    def test_nested_overrides_skip_missing_flags(self):
        self.assertEqual(
            nested_overrides({
                ('seed', ): None,
                ('train', 'steps'): 10,
                ('train', 'group_size'): None,
            }),
            {'train': {'steps': 10}})

    def test_fail_on_unknown_key(self):
        path = self.write('run.yaml', {'sead': 1})
        with self.assertRaises(ConfigError) as ctx:
            load_run_config(path)
        self.assertTrue(any('sead' in p for p in ctx.exception.problems))

    def test_fail_on_negative_lambda(self):
        with self.assertRaises(ConfigError):
            load_run_config(overrides={'lambda': -1})

    def test_fail_on_missing_file_reference(self):
        with self.assertRaises(ConfigError) as ctx:
            load_run_config(overrides={
                'curate': {'problems': str(self.dir / 'missing.jsonl')},
            })
        self.assertTrue(any(
            'problems' in p for p in ctx.exception.problems))

    def test_fail_on_ambiguous_role(self):
        script = self.write('script.yaml', {'propose': {}})
        with self.assertRaises(ConfigError):
            load_run_config(overrides={'judge': {}})
        with self.assertRaises(ConfigError):
            load_run_config(overrides={'judge': {
                'script': str(script),
                'provider': {'provider': 'scripted', 'model_id': 'm'},
            }})
        config = load_run_config(overrides={
            'judge': {'script': str(script)}})
        self.assertEqual(config.judge.script, script)

    def test_fail_on_unreadable_file(self):
        path = self.dir / 'broken.yaml'
        path.write_text('seed: [1\n', encoding='utf-8')
        with self.assertRaises(ConfigError):
            load_run_config(path)

    def test_json_config(self):
        path = self.dir / 'run.json'
        path.write_text('{"seed": 3, "suite": {"tasks": 4}}')
        config = load_run_config(path)
        self.assertEqual(config.seed, 3)
        self.assertEqual(config.suite.tasks, 4)

    def test_effective_config_echo(self):
        config = load_run_config(overrides={
            'seed': 5, 'lambda': 0.5, 'train': {'steps': 12}})
        path = write_effective_config(config, self.dir / 'out')
        self.assertEqual(path.name, EFFECTIVE_CONFIG_NAME)
        with open(path, 'r', encoding='utf-8') as fh:
            echoed = yaml.safe_load(fh)
        self.assertEqual(echoed['seed'], 5)
        self.assertEqual(echoed['lambda'], 0.5)
        self.assertEqual(echoed['train']['steps'], 12)
        self.assertEqual(RunConfig.parse_obj(echoed), config)
