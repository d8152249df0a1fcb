from arithmetic.management.base import ArithmeticCommand
from arithmetic.pell import BoundReport, pell_fundamental, power_sequence, require_discriminant, verify_pell_bounds
from arithmetic.serializers import to_payload


class Command(ArithmeticCommand):
    help = ('Bounded search for the fundamental solution of t^2 - D u^2 = 4; '
            'JSON carries t, u, eps_abs and status at the top level')

    csv_columns = BoundReport.CSV_COLUMNS

    def add_command_arguments(self, parser):
        parser.add_argument('--D', required=True, help='Discriminant as "a+b*w"')
        parser.add_argument('--bound', type=int, default=None, help='Search N(u) up to this bound')
        parser.add_argument('--verify-n', type=int, default=None,
                            help='Also check the Pell inequalities for n = 0..N')
        parser.add_argument('--powers', type=int, default=0, help='Include (t_n, u_n) for n = 0..N')

    def run(self, spec, **options):
        disc = require_discriminant(spec.parse(options['D']))
        bound = self.budget(options, 'bound', 'PELL_NORM_BOUND')
        unit = pell_fundamental(disc, bound, workers=options['workers'])
        payload = to_payload(unit)
        if options['powers']:
            payload['powers'] = power_sequence(unit, options['powers'])
        if options['verify_n'] is not None:
            payload['bounds'] = verify_pell_bounds(unit, options['verify_n'])
        elif options['out'] == 'csv':
            payload['bounds'] = verify_pell_bounds(unit, 6)
        return payload

    def csv_rows(self, payload):
        return [row.as_row() for row in payload['bounds'].rows]
