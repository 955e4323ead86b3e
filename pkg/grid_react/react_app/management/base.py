import logging

from django.core.management.base import BaseCommand, CommandError

from react_app.exceptions import GridReactError
from react_app.io import write_text

logger = logging.getLogger(__name__)


class ReactCommand(BaseCommand):
    """
    Base for the toolkit commands: toolkit errors become CommandError with the
    error's exit code, and `emit` writes to a file or to stdout.
    """

    def handle(self, *args, **options):
        try:
            return self.run(**options)
        except GridReactError as exc:
            raise CommandError(str(exc), returncode=exc.exit_code) from exc

    def run(self, **options):
        raise NotImplementedError('subclasses of ReactCommand must provide a run() method')

    def emit(self, text, path=None):
        if path:
            write_text(text, path)
            logger.info('Wrote %s', path)
        else:
            self.stdout.write(text, ending='')
