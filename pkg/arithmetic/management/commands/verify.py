from django.core.management.base import CommandError

from arithmetic.management.base import EXIT_INVARIANT, ArithmeticCommand
from arithmetic.properties import SUITES, run_suite


class Command(ArithmeticCommand):
    help = 'Run a randomized property suite; exits 1 when any property fails'

    csv_columns = ('suite', 'property', 'checked', 'failures')

    def add_command_arguments(self, parser):
        parser.add_argument('--suite', choices=SUITES, required=True)
        parser.add_argument('--scale', type=float, default=1.0,
                            help='Multiplier on sample sizes and search ranges')

    def run(self, spec, **options):
        return run_suite(options['suite'], seed=options['seed'], scale=options['scale'])

    def emit(self, payload, out='json'):
        super().emit(payload.to_json() if out == 'json' else payload, out)
        if not payload.ok:
            raise CommandError(f"suite {payload.suite} has failing properties", returncode=EXIT_INVARIANT)
        self.stderr.write(self.style.SUCCESS(f"Suite {payload.suite} passed"))

    def csv_rows(self, payload):
        return [[payload.suite, r.name, r.checked, r.failures] for r in payload.results]
