from react_app.exceptions import OutOfRange, VerificationFailed
from react_app.management.base import ReactCommand
from react_app.verification import SUITES, run_suites


class Command(ReactCommand):
    help = 'Run the randomized property suites; exits with status 3 on any violation.'

    def add_arguments(self, parser):
        parser.add_argument('--suite', action='append', choices=SUITES + ('all',),
                            help='Suite to run (repeatable, default: all)')
        parser.add_argument('--lemma', type=int, choices=[16],
                            help='Run only the exponential-weight probability check')
        parser.add_argument('--m', type=int, help='Number of weights for --lemma 16 (default: 2..12)')
        parser.add_argument('--trials', type=int, help='Trials per suite (default: per-suite)')
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--sigmas', type=float, default=3.0,
                            help='Allowed Monte-Carlo deviation in standard deviations')

    def run(self, suite=None, lemma=None, m=None, trials=None, seed=0, sigmas=3.0, **options):
        if lemma == 16:
            names = ['lemma16']
        elif not suite or 'all' in suite:
            names = list(SUITES)
        else:
            names = list(dict.fromkeys(suite))
        if m is not None and m < 2:
            raise OutOfRange('--m must be at least 2')

        reports = run_suites(names, trials=trials, seed=seed, m=m, sigmas=sigmas)
        for report in reports:
            status = 'ok' if report.passed else 'FAILED'
            self.stdout.write('%-11s %-6s trials=%d skipped=%d violations=%d' % (
                report.name, status, report.trials, report.skipped, len(report.violations)))
            for violation in report.violations[:10]:
                self.stdout.write('    %s' % violation)
        failed = [report.name for report in reports if not report.passed]
        if failed:
            raise VerificationFailed('Verification failed: %s' % ', '.join(failed))
