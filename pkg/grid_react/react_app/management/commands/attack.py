import dataclasses
import logging

from react_app.attacks import resolve_attack_param, simulate_attack
from react_app.grid import solve_dc_power_flow
from react_app.io import dumps, load_grid, load_scenario, write_json
from react_app.management.base import ReactCommand

logger = logging.getLogger(__name__)


class Command(ReactCommand):
    help = 'Simulate an attack scenario and write the observation and the ground truth as JSON.'

    def add_arguments(self, parser):
        parser.add_argument('--grid', required=True, help='Grid JSON file')
        parser.add_argument('--scenario', required=True, help='Scenario JSON file')
        parser.add_argument('--param', type=float, help='Override the scenario sigma / perturbation scale')
        parser.add_argument('--seed', type=int, help='Override the scenario seed')
        parser.add_argument('--out', help='Observation JSON (default: stdout)')
        parser.add_argument('--truth', help='Ground-truth JSON')

    def run(self, grid, scenario, param=None, seed=None, out=None, truth=None, **options):
        grid = load_grid(grid)
        scenario = load_scenario(scenario)
        if param is not None:
            scenario = dataclasses.replace(scenario, param=param)
        if seed is not None:
            scenario = dataclasses.replace(scenario, seed=seed)
        state = solve_dc_power_flow(grid)
        logger.info(
            'Simulating %s attack on %d nodes with %d failed lines, param %.4g',
            scenario.kind.value, len(scenario.H), len(scenario.F),
            resolve_attack_param(scenario.kind, scenario.param, state.theta, grid.injections, scenario.H, grid),
        )
        observation, ground_truth = simulate_attack(grid, state, scenario)
        self.emit(dumps(observation.to_dict(grid)), out)
        if truth:
            write_json(ground_truth.to_dict(grid), truth)
