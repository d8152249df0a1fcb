from arithmetic.congruence import make_level, systole_certificate
from arithmetic.management.base import ArithmeticCommand
from arithmetic.pell import require_discriminant


class Command(ArithmeticCommand):
    help = 'Certify the systole lower bound of a level up to an entry-norm height'

    csv_columns = ('p', 'q', 'r', 's', 'trace')

    def add_command_arguments(self, parser):
        parser.add_argument('--t', required=True, help='Trace whose displacement is the claimed systole')
        parser.add_argument('--u', required=True, help='Level modulus u')
        parser.add_argument('--D', required=True, help='Discriminant as "a+b*w"')
        parser.add_argument('--level-t', default=None,
                            help='t of the Pell solution defining tau, when it differs from --t')
        parser.add_argument('--height', type=int, default=None)

    def run(self, spec, **options):
        disc = require_discriminant(spec.parse(options['D']))
        t = spec.parse(options['t'])
        u = spec.parse(options['u'])
        level_t = spec.parse(options['level_t']) if options['level_t'] else t
        level = make_level(level_t, u, disc)
        height = self.budget(options, 'height', 'SYSTOLE_HEIGHT')
        return systole_certificate(level, t, height, workers=options['workers'])

    def csv_rows(self, payload):
        return [[str(x) for x in M.entries] + [str(M.trace)] for M in payload.witnesses]
