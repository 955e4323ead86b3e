import numpy as np
from django.test import SimpleTestCase

from react_app.exceptions import InputFileError
from react_app.grid import build_admittance, solve_dc_power_flow
from react_app.io import read_text
from react_app.matpower import convert_matpower, parse_case

from .factories import FIXTURES

TWO_BUS = """
mpc.baseMVA = 100;
mpc.bus = [
	1	3	0	0;
	2	1	50	0;
	3	1	%s	0;
];
mpc.gen = [
	1	60	0	0	0	1	100	1;
];
mpc.branch = [
	1	2	0.01	0.1	0	0	0	0	0	0	1;
	2	3	0.01	%s	0	0	0	0	0	0	%s;
	1	3	0.01	0.2	0	0	0	0	0	0	1;
];
"""


class Case14Tests(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.grid = convert_matpower(read_text(FIXTURES / 'case14.m'))

    def test_size(self):
        self.assertEqual(self.grid.node_count, 14)
        self.assertEqual(self.grid.edge_count, 20)
        self.assertEqual(self.grid.reference, 1)

    def test_injections_in_per_unit(self):
        p = dict(zip(self.grid.node_ids, self.grid.injections))
        self.assertAlmostEqual(p[2], 0.183)
        self.assertAlmostEqual(p[3], -0.942)
        # the slack absorbs 272.4 MW generation against 259 MW demand
        self.assertAlmostEqual(p[1], 2.324 - 0.134)
        self.assertAlmostEqual(float(self.grid.injections.sum()), 0.0)

    def test_tap_scales_reactance(self):
        line = self.grid.edge(7)
        self.assertEqual(line.endpoints, (4, 7))
        self.assertAlmostEqual(line.x, 0.20912 * 0.978)

    def test_admittance_rows_sum_to_zero(self):
        self.assertLess(np.max(np.abs(build_admittance(self.grid).sum(axis=1))), 1e-9)

    def test_power_flow(self):
        self.assertLess(solve_dc_power_flow(self.grid).residual, 1e-8)


class ConversionTests(SimpleTestCase):

    def test_out_of_service_branch_dropped(self):
        grid = convert_matpower(TWO_BUS % (10, 0.1, 0))
        self.assertEqual(grid.edge_count, 2)
        self.assertAlmostEqual(float(grid.injections.sum()), 0.0)

    def test_nonpositive_reactance(self):
        with self.assertRaises(InputFileError) as ctx:
            convert_matpower(TWO_BUS % (10, -0.1, 1), path='bad.m')
        self.assertEqual(ctx.exception.line, 13)
        grid = convert_matpower(TWO_BUS % (10, -0.1, 1), drop_nonpositive=True)
        self.assertEqual(grid.edge_count, 2)

    def test_non_numeric_entry(self):
        with self.assertRaises(InputFileError) as ctx:
            convert_matpower(TWO_BUS % ('abc', 0.1, 1), path='bad.m')
        self.assertEqual(ctx.exception.line, 6)
        self.assertIn('bad.m:6', str(ctx.exception))

    def test_missing_branch_block(self):
        with self.assertRaises(InputFileError):
            parse_case('mpc.bus = [\n1 3 0 0;\n];\n')

    def test_unterminated_block(self):
        with self.assertRaises(InputFileError):
            parse_case('mpc.bus = [\n1 3 0 0;\n')

    def test_base_mva(self):
        base, blocks = parse_case('mpc.baseMVA = 50;\nmpc.bus = [1 3 0 0];\nmpc.branch = [];\n')
        self.assertEqual(base, 50.0)
        self.assertEqual(blocks['bus'], [(2, [1.0, 3.0, 0.0, 0.0])])
