import io
import json
import tempfile
from pathlib import Path
from unittest import mock

import numpy as np
import pandas as pd
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from react_app.grid import solve_dc_power_flow
from react_app.io import write_json
from react_app.verification import SuiteReport

from .factories import FIXTURES, null_observation, small_grid


class CommandTestCase(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)

    def call(self, name, **options):
        out = io.StringIO()
        call_command(name, stdout=out, stderr=io.StringIO(), **options)
        return out.getvalue()


class PowerflowCommandTests(CommandTestCase):

    def test_writes_angles_and_flows(self):
        frame = pd.read_csv(io.StringIO(self.call('powerflow', grid=str(FIXTURES / 'small_grid.json'))))
        self.assertEqual(list(frame.columns), ['element', 'id', 'value'])
        self.assertEqual(len(frame), 6 + 8)
        theta = frame[frame['element'] == 'theta'].set_index('id')['value']
        self.assertEqual(theta[0], 0.0)

    def test_missing_file(self):
        with self.assertRaises(CommandError) as ctx:
            self.call('powerflow', grid=str(self.dir / 'missing.json'))
        self.assertEqual(ctx.exception.returncode, 1)

    def test_malformed_json_reports_position(self):
        path = self.dir / 'broken.json'
        path.write_text('{"nodes": [\n  {"id": 1,}\n]}')
        with self.assertRaises(CommandError) as ctx:
            self.call('powerflow', grid=str(path))
        self.assertIn('broken.json:2:', str(ctx.exception))
        self.assertEqual(ctx.exception.returncode, 1)

    def test_invalid_grid(self):
        path = self.dir / 'grid.json'
        write_json({'nodes': [{'id': 0, 'p': 1}, {'id': 1, 'p': 1}], 'edges': [{'id': 0, 'u': 0, 'v': 1, 'x': 1}]},
                   path)
        with self.assertRaises(CommandError) as ctx:
            self.call('powerflow', grid=str(path))
        self.assertEqual(ctx.exception.returncode, 1)


class AttackDetectCommandTests(CommandTestCase):

    def test_attack_then_detect(self):
        observation = self.dir / 'observation.json'
        truth = self.dir / 'truth.json'
        self.call('attack', grid=str(FIXTURES / 'small_grid.json'), scenario=str(FIXTURES / 'small_scenario.json'),
                  out=str(observation), truth=str(truth))
        data = json.loads(observation.read_text())
        self.assertEqual(set(data), {'nodes', 'theta', 'theta_obs', 'p'})
        self.assertEqual(json.loads(truth.read_text())['failed'], [1])

        outcome = json.loads(self.call('detect', grid=str(FIXTURES / 'small_grid.json'),
                                       observation=str(observation), T=5, seed=1))
        self.assertEqual(set(outcome), {'success', 'detected_H', 'result', 'trace'})
        self.assertGreaterEqual(outcome['result']['confidence'], 0.0)

    def test_attack_is_reproducible(self):
        options = dict(grid=str(FIXTURES / 'small_grid.json'), scenario=str(FIXTURES / 'small_scenario.json'))
        self.assertEqual(self.call('attack', **options), self.call('attack', **options))
        self.assertNotEqual(self.call('attack', **options), self.call('attack', seed=8, **options))

    def test_detect_null_attack(self):
        grid = small_grid()
        path = self.dir / 'observation.json'
        write_json(null_observation(grid, solve_dc_power_flow(grid).theta).to_dict(grid), path)
        outcome = json.loads(self.call('detect', grid=str(FIXTURES / 'small_grid.json'), observation=str(path)))
        self.assertTrue(outcome['success'])
        self.assertEqual(outcome['detected_H'], [])
        self.assertEqual(outcome['result']['failed'], [])

    def test_scenario_with_foreign_line(self):
        path = self.dir / 'scenario.json'
        write_json({'H': [1, 2, 3], 'F': [5], 'kind': 'replay'}, path)
        with self.assertRaises(CommandError) as ctx:
            self.call('attack', grid=str(FIXTURES / 'small_grid.json'), scenario=str(path))
        self.assertEqual(ctx.exception.returncode, 1)

    def test_disconnecting_failure(self):
        path = self.dir / 'scenario.json'
        write_json({'H': [1, 2, 3], 'F': [1, 2], 'kind': 'distortion'}, path)
        with self.assertRaises(CommandError) as ctx:
            self.call('attack', grid=str(FIXTURES / 'small_grid.json'), scenario=str(path))
        self.assertEqual(ctx.exception.returncode, 1)


class ExperimentCommandTests(CommandTestCase):

    def test_same_seed_same_table(self):
        config = str(FIXTURES / 'small_experiment.json')
        summary = self.dir / 'summary.csv'
        first = pd.read_csv(io.StringIO(self.call('experiment', config=config, summary=str(summary))), comment='#')
        second = pd.read_csv(io.StringIO(self.call('experiment', config=config, jobs=2)), comment='#')
        pd.testing.assert_frame_equal(first.drop(columns='runtime_ms'), second.drop(columns='runtime_ms'))
        self.assertEqual(len(pd.read_csv(summary)), 2)

    def test_output_file(self):
        out = self.dir / 'rows.csv'
        self.call('experiment', config=str(FIXTURES / 'small_experiment.json'), out=str(out), T=0)
        self.assertTrue(out.read_text().startswith('#'))


class VerifyCommandTests(CommandTestCase):

    def test_lemma(self):
        output = self.call('verify', lemma=16, m=8, trials=20000, sigmas=4.0)
        self.assertIn('lemma16', output)
        self.assertIn('ok', output)

    def test_single_suite(self):
        output = self.call('verify', suite=['flow'], trials=3, seed=1)
        self.assertIn('flow', output)
        self.assertNotIn('FAILED', output)

    def test_violations_exit_with_status_3(self):
        failing = [SuiteReport('flow', trials=1, violations=['residual too large'])]
        with mock.patch('react_app.management.commands.verify.run_suites', return_value=failing):
            with self.assertRaises(CommandError) as ctx:
                self.call('verify', suite=['flow'])
        self.assertEqual(ctx.exception.returncode, 3)

    def test_invalid_m(self):
        with self.assertRaises(CommandError) as ctx:
            self.call('verify', lemma=16, m=1)
        self.assertEqual(ctx.exception.returncode, 1)


class ConversionCommandTests(CommandTestCase):

    def test_convert_case(self):
        out = self.dir / 'case14.json'
        self.call('convert_matpower', case=str(FIXTURES / 'case14.m'), out=str(out))
        data = json.loads(out.read_text())
        self.assertEqual(len(data['nodes']), 14)
        self.assertEqual(data['reference'], 1)

    def test_synthesize_grid_with_area(self):
        out = self.dir / 'grid.json'
        area = self.dir / 'area.json'
        self.call('synthesize_grid', nodes=30, seed=2, out=str(out), area_nodes=5, area_out=str(area))
        self.assertEqual(len(json.loads(out.read_text())['nodes']), 30)
        self.assertEqual(len(json.loads(area.read_text())), 5)
        self.assertTrue(np.all(np.diff(json.loads(area.read_text())) > 0))
