import numpy as np
from django.test import SimpleTestCase, override_settings

from react_app.atac import compute_s0
from react_app.attacks import (
    AttackKind, AttackScenario, Observation, apply_line_failures, enumerate_failure_sets,
    failure_set_count, resolve_attack_param, simulate_attack,
)
from react_app.exceptions import DisconnectsGrid, InvalidScenario
from react_app.grid import (
    boundary, build_admittance, complement, interior, solve_dc_power_flow,
)
from react_app.synthetic import grow_area, synthetic_grid
from react_app.verification import random_connected_failures

from .factories import cycle_grid, random_tree, small_grid


class LineFailureTests(SimpleTestCase):

    def test_no_failures(self):
        grid = cycle_grid([1, -1, 0, 0])
        self.assertIs(apply_line_failures(grid, set()), grid)

    def test_cycle_becomes_path(self):
        grid = apply_line_failures(cycle_grid([1, -1, 0, 0]), {2})
        self.assertEqual(grid.edge_count, 3)
        self.assertTrue(grid.is_connected())

    def test_tree_line_is_a_bridge(self):
        grid, _ = random_tree(6, np.random.default_rng(0))
        with self.assertRaises(DisconnectsGrid):
            apply_line_failures(grid, {3})


class SimulateAttackTests(SimpleTestCase):

    def setUp(self):
        rng = np.random.default_rng(17)
        self.grid = synthetic_grid(40, seed=17)
        self.H = grow_area(self.grid, 7, rng)
        self.F = random_connected_failures(self.grid, self.H, 2, rng)
        self.theta = solve_dc_power_flow(self.grid)
        self.A = build_admittance(self.grid)

    def simulate(self, kind, **kwargs):
        scenario = AttackScenario(self.H, self.F, kind, seed=kwargs.pop('seed', 9), **kwargs)
        return simulate_attack(self.grid, self.theta, scenario)

    def test_outside_angles_are_true_post_attack_angles(self):
        for kind in AttackKind:
            observation, truth = self.simulate(kind)
            outside = self.grid.positions(self.grid.sorted_nodes(complement(self.grid, self.H)))
            np.testing.assert_array_equal(observation.theta_obs[outside], truth.theta_post.theta[outside])

    def test_post_attack_angles_satisfy_post_attack_flow_law(self):
        observation, truth = self.simulate(AttackKind.DISTORTION)
        residual = build_admittance(truth.grid_post) @ truth.theta_post.theta - observation.p
        self.assertLess(np.max(np.abs(residual)), 1e-8)

    def test_distortion_violations_surround_the_area(self):
        observation, _ = self.simulate(AttackKind.DISTORTION)
        s0 = compute_s0(self.A, observation.p, observation.theta_obs, node_ids=self.grid.node_ids)
        self.assertEqual(s0, complement(self.grid, interior(self.grid, complement(self.grid, self.H))))

    def test_replay_violations_mark_both_borders(self):
        observation, _ = self.simulate(AttackKind.REPLAY)
        outside = complement(self.grid, self.H)
        self.assertTrue(interior(self.grid, outside))
        s0 = compute_s0(self.A, observation.p, observation.theta_obs, node_ids=self.grid.node_ids)
        self.assertEqual(s0, boundary(self.grid, self.H) | boundary(self.grid, outside))

    def test_replay_marks_border_node_next_to_reference(self):
        # node 2 reaches the outside only through the reference bus 1
        grid = cycle_grid([0.5, -0.2, 0.3, -0.4, 0.1, -0.3], reference=1)
        H = frozenset({2, 3, 4})
        theta = solve_dc_power_flow(grid)
        A = build_admittance(grid)
        expected = boundary(grid, H) | boundary(grid, complement(grid, H))
        self.assertEqual(expected, {1, 2, 4, 5})
        for seed in range(20):
            scenario = AttackScenario(H, frozenset({1}), AttackKind.REPLAY, seed=seed)
            observation, _ = simulate_attack(grid, theta, scenario)
            s0 = compute_s0(A, observation.p, observation.theta_obs, node_ids=grid.node_ids)
            self.assertEqual(s0, expected, 'seed %d' % seed)

    def test_replay_agrees_with_real_injections_inside(self):
        observation, _ = self.simulate(AttackKind.REPLAY)
        inner = self.grid.positions(self.grid.sorted_nodes(interior(self.grid, self.H)))
        np.testing.assert_allclose((self.A @ observation.theta_obs)[inner], observation.p[inner], atol=1e-8)

    def test_same_seed_same_observation(self):
        first, _ = self.simulate(AttackKind.DISTORTION, seed=3)
        second, _ = self.simulate(AttackKind.DISTORTION, seed=3)
        third, _ = self.simulate(AttackKind.DISTORTION, seed=4)
        np.testing.assert_array_equal(first.theta_obs, second.theta_obs)
        self.assertFalse(np.array_equal(first.theta_obs, third.theta_obs))

    def test_vanishing_noise_without_failures_is_no_attack(self):
        scenario = AttackScenario(self.H, frozenset(), AttackKind.DISTORTION, param=1e-300)
        observation, _ = simulate_attack(self.grid, self.theta, scenario)
        np.testing.assert_allclose(observation.theta_obs, self.theta.theta, atol=1e-12)

    @override_settings(GRID_REACT={'SIGMA_FACTOR': 0.5})
    def test_default_sigma_follows_settings(self):
        expected = 0.5 * np.max(np.abs(self.theta.theta))
        value = resolve_attack_param('distortion', None, self.theta, self.A @ self.theta.theta, self.H, self.grid)
        self.assertAlmostEqual(value, expected)
        self.assertEqual(resolve_attack_param('replay', 0.3, self.theta, None, self.H, self.grid), 0.3)

    def test_failures_outside_area_rejected(self):
        outside_line = next(e.id for e in self.grid.edges if e.u not in self.H and e.v not in self.H)
        scenario = AttackScenario(self.H, frozenset({outside_line}), AttackKind.DISTORTION)
        with self.assertRaises(InvalidScenario):
            simulate_attack(self.grid, self.theta, scenario)

    def test_unknown_area_node_rejected(self):
        scenario = AttackScenario(frozenset({999}), frozenset(), AttackKind.REPLAY)
        with self.assertRaises(InvalidScenario):
            simulate_attack(self.grid, self.theta, scenario)


class ScenarioDocumentTests(SimpleTestCase):

    def test_null_param_selects_default(self):
        scenario = AttackScenario.from_dict({'H': [1, 2], 'F': [], 'kind': 'replay', 'param': None})
        self.assertIsNone(scenario.param)
        self.assertEqual(scenario.to_dict()['kind'], 'replay')

    def test_unknown_kind(self):
        with self.assertRaises(InvalidScenario):
            AttackScenario.from_dict({'H': [1], 'kind': 'spoof'})

    def test_observation_accepts_any_node_order(self):
        grid = small_grid()
        theta = solve_dc_power_flow(grid).theta
        order = list(reversed(grid.node_ids))
        data = {
            'nodes': order,
            'theta': [float(theta[grid.index[i]]) for i in order],
            'theta_obs': [float(theta[grid.index[i]]) for i in order],
        }
        observation = Observation.from_dict(data, grid)
        np.testing.assert_allclose(observation.theta_pre, theta)
        np.testing.assert_allclose(observation.p, grid.injections, atol=1e-8)

    def test_observation_must_cover_grid(self):
        grid = small_grid()
        with self.assertRaises(InvalidScenario):
            Observation.from_dict({'nodes': [0, 1], 'theta': [0, 0], 'theta_obs': [0, 0]}, grid)


class FailureSetEnumerationTests(SimpleTestCase):

    def test_all_single_failures(self):
        grid = small_grid()
        sets = enumerate_failure_sets(grid, {1, 2, 3}, 1, 100, np.random.default_rng(0))
        self.assertEqual(sets, [frozenset({1}), frozenset({2})])

    def test_disconnecting_sets_filtered(self):
        grid = small_grid()
        self.assertEqual(failure_set_count(grid, {1, 2, 3}, 2), 1)
        self.assertEqual(enumerate_failure_sets(grid, {1, 2, 3}, 2, 100, np.random.default_rng(0)), [])

    def test_too_large(self):
        grid = small_grid()
        self.assertEqual(enumerate_failure_sets(grid, {1, 2, 3}, 3, 100, np.random.default_rng(0)), [])

    def test_sampling_returns_distinct_sets(self):
        grid = synthetic_grid(40, seed=2)
        area = frozenset(grid.node_ids)
        sets = enumerate_failure_sets(grid, area, 2, 100, np.random.default_rng(1))
        self.assertEqual(len(sets), 100)
        self.assertEqual(len(set(sets)), 100)
        for F in sets:
            self.assertTrue(grid.is_connected(removed=F))

    def test_size_zero_rejected(self):
        with self.assertRaises(InvalidScenario):
            enumerate_failure_sets(small_grid(), {1, 2}, 0, 10, np.random.default_rng(0))
