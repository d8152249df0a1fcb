from arithmetic.congruence import factor_modulus, level_index, make_level, sl2_order, torsion_scan
from arithmetic.management.base import ArithmeticCommand
from arithmetic.pell import require_discriminant


class Command(ArithmeticCommand):
    help = 'Build the level SL_2(O_d)_tau[u] from a Pell solution and print tau and its index'

    csv_columns = ('u', 'tau', 'index', 'sl2_order', 'degenerate', 'torsion_free')

    def add_command_arguments(self, parser):
        parser.add_argument('--t', required=True, help='Pell solution t as "a+b*w"')
        parser.add_argument('--u', required=True, help='Pell solution u as "a+b*w"')
        parser.add_argument('--D', required=True, help='Discriminant as "a+b*w"')

    def run(self, spec, **options):
        disc = require_discriminant(spec.parse(options['D']))
        level = make_level(spec.parse(options['t']), spec.parse(options['u']), disc)
        ring = factor_modulus(level.u)
        index = level_index(level)
        return {
            'level': level,
            'tau': level.tau,
            'index': index,
            'sl2_order': sl2_order(ring),
            'residue_ring': ring,
            'index_within_norm_cube': 2 * index <= level.u.norm ** 3,
            'torsion': torsion_scan(level),
        }

    def csv_rows(self, payload):
        return [[str(payload['level'].u), str(payload['tau']), payload['index'], payload['sl2_order'],
                 payload['level'].degenerate, payload['torsion'].certified]]
