"""
Shared plumbing for the arithmetic and reports management commands.
"""

import logging

from django.core.management.base import BaseCommand, CommandError

from arithmetic import conf
from arithmetic.exceptions import BudgetExhausted, InvariantViolation, UnsupportedError, UsageError
from arithmetic.ring import RingSpec
from arithmetic.serializers import csv_text, dumps

logger = logging.getLogger(__name__)

EXIT_INVARIANT = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


class ArithmeticCommand(BaseCommand):
    """
    Adds the global flags (--d, --out, --workers, --seed) and maps domain
    errors onto exit codes. Subclasses implement `run(spec, **options)` and
    return the payload to print.
    """

    csv_columns = None

    def add_arguments(self, parser):
        parser.add_argument('--d', type=int, default=1, help='Ring O_d, d in {1,2,3,7,11,19,43,67,163}')
        parser.add_argument('--out', choices=('json', 'csv'), default='json', help='Output format')
        parser.add_argument('--workers', type=int, default=None, help='Worker processes for heavy searches')
        parser.add_argument('--seed', type=int, default=None, help='Seed for randomized suites')
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def handle(self, *args, **options):
        if options['workers'] is None:
            options['workers'] = conf.get('WORKERS')
        if options['seed'] is None:
            options['seed'] = conf.get('SEED')
        try:
            spec = RingSpec(options.pop('d'))
            payload = self.run(spec, **options)
        except (UsageError, UnsupportedError) as e:
            raise CommandError(str(e), returncode=EXIT_USAGE)
        except BudgetExhausted as e:
            self.emit_partial(e)
            raise CommandError(str(e), returncode=EXIT_BUDGET)
        except InvariantViolation as e:
            logger.error(f"Invariant violation in {self.__module__}: {e}")
            raise CommandError(str(e), returncode=EXIT_INVARIANT)
        self.emit(payload, options['out'])

    def run(self, spec, **options):
        raise NotImplementedError

    def emit(self, payload, out='json'):
        if out == 'csv':
            if self.csv_columns is None:
                raise CommandError(f"{self.__module__.rsplit('.', 1)[-1]} has no CSV output",
                                   returncode=EXIT_USAGE)
            self.stdout.write(csv_text(self.csv_columns, self.csv_rows(payload)), ending='')
        else:
            self.stdout.write(dumps(payload))

    def csv_rows(self, payload):
        return []

    def emit_partial(self, error):
        partial = getattr(error, 'partial', None)
        if partial is not None:
            self.stdout.write(dumps(partial))

    def budget(self, options, flag, setting):
        value = options.get(flag)
        return conf.get(setting) if value is None else value
