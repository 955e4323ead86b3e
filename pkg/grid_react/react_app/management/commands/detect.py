import logging

import numpy as np

from react_app.detection import react
from react_app.io import dumps, load_grid, load_observation
from react_app.management.base import ReactCommand

logger = logging.getLogger(__name__)


class Command(ReactCommand):
    help = 'Run REACT on an observation and write the outcome as JSON.'

    def add_arguments(self, parser):
        parser.add_argument('--grid', required=True, help='Grid JSON file')
        parser.add_argument('--observation', required=True, help='Observation JSON file')
        parser.add_argument('--T', type=int, dest='T', help='Randomized LIFD iterations (default: GRID_REACT DEFAULT_T)')
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--out', help='Outcome JSON (default: stdout)')

    def run(self, grid, observation, T=None, seed=0, out=None, **options):
        grid = load_grid(grid)
        observation = load_observation(observation, grid)
        outcome = react(grid, observation.theta_pre, observation.theta_obs, T=T,
                        rng=np.random.default_rng(seed))
        logger.info('Detection %s with confidence %.4f',
                    'succeeded' if outcome.success else 'failed', outcome.result.confidence)
        self.emit(dumps(outcome.to_dict()), out)
