import numpy as np

from react_app.io import dumps, write_json
from react_app.management.base import ReactCommand
from react_app.synthetic import synthetic_area, synthetic_grid


class Command(ReactCommand):
    help = 'Generate a synthetic meshed test grid, optionally with an attacked area.'

    def add_arguments(self, parser):
        parser.add_argument('--nodes', type=int, required=True)
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--mean-degree', type=float, default=2.6)
        parser.add_argument('--out', help='Grid JSON (default: stdout)')
        parser.add_argument('--area-nodes', type=int)
        parser.add_argument('--area-edges', type=int)
        parser.add_argument('--area-out', help='Area JSON (node id list)')

    def run(self, nodes, seed=0, mean_degree=2.6, out=None, area_nodes=None, area_edges=None,
            area_out=None, **options):
        grid = synthetic_grid(nodes, seed=seed, mean_degree=mean_degree)
        self.emit(dumps(grid.to_dict()), out)
        if area_nodes is not None:
            area = synthetic_area(grid, area_nodes, area_edges if area_edges is not None else area_nodes - 1,
                                  np.random.default_rng([seed, 1]))
            if area_out:
                write_json(sorted(area), area_out)
            else:
                self.stderr.write('area: %s' % sorted(area))
