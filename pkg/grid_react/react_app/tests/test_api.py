from rest_framework import status
from rest_framework.test import APISimpleTestCase

from react_app.grid import solve_dc_power_flow
from react_app.io import read_json

from .factories import FIXTURES, null_observation, small_grid


class ReactApiTests(APISimpleTestCase):

    def setUp(self):
        self.grid_doc = read_json(FIXTURES / 'small_grid.json')
        self.scenario_doc = read_json(FIXTURES / 'small_scenario.json')

    def test_powerflow(self):
        response = self.client.post('/api/react/powerflow/', {'grid': self.grid_doc}, format='json')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(set(response.data['theta']), {'0', '1', '2', '3', '4', '5'})
        self.assertEqual(response.data['theta']['0'], 0.0)
        self.assertEqual(len(response.data['flows']), 8)
        self.assertLess(response.data['residual'], 1e-8)

    def test_invalid_grid(self):
        self.grid_doc['edges'][0]['x'] = -1.0
        response = self.client.post('/api/react/powerflow/', {'grid': self.grid_doc}, format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertEqual(response.data['exit_code'], 1)
        self.assertIn('reactance', response.data['error'].lower())

    def test_missing_grid(self):
        response = self.client.post('/api/react/powerflow/', {}, format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn('grid', response.data)

    def test_attack_and_detect(self):
        response = self.client.post('/api/react/attack/',
                                    {'grid': self.grid_doc, 'scenario': self.scenario_doc}, format='json')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data['truth']['failed'], [1])

        response = self.client.post('/api/react/detect/', {
            'grid': self.grid_doc, 'observation': response.data['observation'], 'T': 5, 'seed': 2,
        }, format='json')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertIn('detected_H', response.data)

    def test_detect_null_attack(self):
        grid = small_grid()
        observation = null_observation(grid, solve_dc_power_flow(grid).theta).to_dict(grid)
        response = self.client.post('/api/react/detect/', {'grid': self.grid_doc, 'observation': observation},
                                    format='json')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertTrue(response.data['success'])
        self.assertEqual(response.data['detected_H'], [])

    def test_detect_observation_missing_a_node(self):
        grid = small_grid()
        observation = null_observation(grid, solve_dc_power_flow(grid).theta).to_dict(grid)
        for key in ('nodes', 'theta', 'theta_obs', 'p'):
            observation[key] = observation[key][:-1]
        response = self.client.post('/api/react/detect/', {'grid': self.grid_doc, 'observation': observation},
                                    format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertEqual(response.data['exit_code'], 1)
        self.assertIn('every grid node', response.data['error'])

    def test_detect_coerces_observation_fields(self):
        grid = small_grid()
        observation = null_observation(grid, solve_dc_power_flow(grid).theta).to_dict(grid)
        observation['nodes'] = [str(i) for i in observation['nodes']]
        observation['theta_obs'] = ['%r' % v for v in observation['theta_obs']]
        response = self.client.post('/api/react/detect/', {'grid': self.grid_doc, 'observation': observation},
                                    format='json')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data['detected_H'], [])

    def test_attack_with_bad_scenario(self):
        self.scenario_doc['F'] = [1, 2]
        response = self.client.post('/api/react/attack/',
                                    {'grid': self.grid_doc, 'scenario': self.scenario_doc}, format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)

    def test_weight_probability(self):
        response = self.client.get('/api/react/weight_probability/', {'m': 5, 'k': 2})
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data['fraction'], '11/16')
        self.assertAlmostEqual(response.data['probability'], 0.6875)
        self.assertAlmostEqual(response.data['expected_iterations'], 16 / 11)

    def test_weight_probability_range(self):
        response = self.client.get('/api/react/weight_probability/', {'m': 3, 'k': 3})
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
