import itertools

import numpy as np
from django.test import SimpleTestCase

from react_app.detection import is_confident, react
from react_app.exceptions import MalformedInstance
from react_app.gadgets import (
    gadget_observation, gen_3partition_gadget, search_failure_sets, solve_three_partition,
)
from react_app.grid import build_admittance


def consistent(gadget, F):
    A_post = build_admittance(gadget.grid.without_edges(F))
    return np.max(np.abs(A_post @ gadget.theta_post - gadget.grid.injections)) < 1e-9


class GadgetConstructionTests(SimpleTestCase):

    def test_single_set(self):
        gadget = gen_3partition_gadget((1, 1, 1), 3)
        self.assertEqual(gadget.grid.node_count, 4)
        self.assertEqual(gadget.grid.edge_count, 3)
        self.assertEqual(gadget.failure_set_for([(0, 1, 2)]), frozenset())
        self.assertTrue(consistent(gadget, frozenset()))

    def test_pre_attack_angles_solve_the_flow_law(self):
        for with_dummies in (False, True):
            gadget = gen_3partition_gadget((5, 5, 5, 4, 4, 4, 3, 3, 3), 12, with_dummies=with_dummies)
            residual = build_admittance(gadget.grid) @ gadget.theta - gadget.grid.injections
            self.assertLess(np.max(np.abs(residual)), 1e-9)

    def test_layout_with_dummies(self):
        gadget = gen_3partition_gadget((5, 5, 5, 4, 4, 4, 3, 3, 3), 12, with_dummies=True)
        self.assertEqual(gadget.grid.node_count, 24)
        self.assertEqual(gadget.grid.edge_count, 3 + 27 + 9)
        self.assertEqual(gadget.H, frozenset(gadget.x_nodes) | frozenset(gadget.y_nodes))
        partition = solve_three_partition(gadget.s, gadget.B)
        self.assertTrue(consistent(gadget, gadget.failure_set_for(partition)))

    def test_malformed_instances(self):
        with self.assertRaises(MalformedInstance):
            gen_3partition_gadget((1, 2), 3)
        with self.assertRaises(MalformedInstance):
            gen_3partition_gadget((1, 1, 2), 3)
        with self.assertRaises(MalformedInstance):
            gen_3partition_gadget((2, 1, 3), 6, require_bounds=True)

    def test_observation_is_fabricated_inside(self):
        gadget = gen_3partition_gadget((5, 5, 5, 4, 4, 4, 3, 3, 3), 12, with_dummies=True)
        observation = gadget_observation(gadget, np.random.default_rng(0))
        outside = gadget.grid.positions(gadget.grid.sorted_nodes(set(gadget.grid.node_ids) - gadget.H))
        np.testing.assert_array_equal(observation.theta_obs[outside], gadget.theta_post[outside])
        np.testing.assert_allclose(observation.p, gadget.grid.injections, atol=1e-9)


class PartitionEquivalenceTests(SimpleTestCase):

    def test_yes_instance(self):
        gadget = gen_3partition_gadget((5, 5, 5, 4, 4, 4, 3, 3, 3), 12)
        partition = solve_three_partition(gadget.s, gadget.B)
        self.assertIsNotNone(partition)
        self.assertTrue(all(sum(gadget.s[i] for i in group) == 12 for group in partition))
        self.assertTrue(consistent(gadget, gadget.failure_set_for(partition)))
        found = search_failure_sets(gadget.grid, gadget.theta_post, gadget.grid.injections, limit=3)
        self.assertTrue(found)
        for F in found:
            self.assertTrue(consistent(gadget, F))

    def test_loose_instance_is_partitionable(self):
        # 5+5+2, 5+4+3, 5+4+3
        self.assertIsNotNone(solve_three_partition((5, 5, 5, 5, 4, 4, 3, 3, 2), 12))

    def test_no_instances(self):
        for s in ((9, 9, 6, 6, 6, 6, 6, 6, 6), (7, 7, 7, 7, 7, 7, 7, 7, 4)):
            self.assertIsNone(solve_three_partition(s, 20))
            gadget = gen_3partition_gadget(s, 20)
            self.assertEqual(search_failure_sets(gadget.grid, gadget.theta_post, gadget.grid.injections), [])

    def test_search_matches_exhaustive_enumeration(self):
        gadget = gen_3partition_gadget((3, 3, 4, 3, 3, 4), 10)
        edges = gadget.grid.edge_ids
        brute = {frozenset(F) for r in range(len(edges) + 1) for F in itertools.combinations(edges, r)
                 if consistent(gadget, F)}
        found = search_failure_sets(gadget.grid, gadget.theta_post, gadget.grid.injections)
        self.assertEqual(len(brute), 12)
        self.assertEqual(set(found), brute)

    def test_react_on_yes_gadget(self):
        gadget = gen_3partition_gadget((5, 5, 5, 4, 4, 4, 3, 3, 3), 12)
        outcome = react(gadget.grid, gadget.theta, gadget.theta_post, T=0, rng=np.random.default_rng(0))
        self.assertTrue(is_confident(outcome.result.confidence))
