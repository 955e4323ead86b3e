from react_app.io import dumps, read_text
from react_app.management.base import ReactCommand
from react_app.matpower import convert_matpower


class Command(ReactCommand):
    help = 'Convert a MATPOWER case file into a grid JSON document.'

    def add_arguments(self, parser):
        parser.add_argument('--case', required=True, help='MATPOWER .m case file')
        parser.add_argument('--out', help='Grid JSON (default: stdout)')
        parser.add_argument('--drop-nonpositive', action='store_true',
                            help='Drop branches with non-positive reactance instead of failing')

    def run(self, case, out=None, drop_nonpositive=False, **options):
        grid = convert_matpower(read_text(case), path=case, drop_nonpositive=drop_nonpositive)
        self.emit(dumps(grid.to_dict()), out)
