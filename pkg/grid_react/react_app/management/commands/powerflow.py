import pandas as pd

from react_app.grid import line_flows, solve_dc_power_flow
from react_app.io import load_grid
from react_app.management.base import ReactCommand


class Command(ReactCommand):
    help = 'Solve the DC power flow of a grid and write phase angles and line flows as CSV.'

    def add_arguments(self, parser):
        parser.add_argument('--grid', required=True, help='Grid JSON file')
        parser.add_argument('--out', help='Output CSV (default: stdout)')

    def run(self, grid, out=None, **options):
        grid = load_grid(grid)
        state = solve_dc_power_flow(grid)
        flows = line_flows(grid, state)
        frame = pd.DataFrame({
            'element': ['theta'] * grid.node_count + ['flow'] * grid.edge_count,
            'id': list(grid.node_ids) + list(grid.edge_ids),
            'value': list(state.theta) + list(flows),
        })
        self.emit(frame.to_csv(index=False, float_format='%.12g', lineterminator='\n'), out)
