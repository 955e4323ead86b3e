import dataclasses

from react_app.harness import ExperimentConfig, format_csv, run_experiment, write_csv
from react_app.management.base import ReactCommand


class Command(ReactCommand):
    help = 'Run an experiment config and write per-scenario metrics as CSV.'

    def add_arguments(self, parser):
        parser.add_argument('--config', required=True, help='Experiment config JSON file')
        parser.add_argument('--seed', type=int, help='Override the master seed')
        parser.add_argument('--jobs', type=int, help='Override the worker count')
        parser.add_argument('--T', type=int, dest='T', help='Override the LIFD iteration budget')
        parser.add_argument('--out', help='Metrics CSV (default: stdout)')
        parser.add_argument('--summary', help='Per-cell summary CSV')

    def run(self, config, seed=None, jobs=None, T=None, out=None, summary=None, **options):
        config = ExperimentConfig.load(config)
        overrides = {name: value for name, value in (('seed', seed), ('jobs', jobs), ('T', T))
                     if value is not None}
        if overrides:
            config = dataclasses.replace(config, **overrides)
        report = run_experiment(config)
        self.emit(format_csv(report.rows), out)
        if summary:
            write_csv(report.summary, summary, note=None)
