from arithmetic.management.base import ArithmeticCommand
from arithmetic.pell import require_discriminant
from arithmetic.quadforms import class_number_estimate


class Command(ArithmeticCommand):
    help = 'Estimate h(D) by enumerating forms and merging them under bounded word search'

    csv_columns = ('a', 'b', 'c')

    def add_command_arguments(self, parser):
        parser.add_argument('--D', required=True, help='Discriminant as "a+b*w"')
        parser.add_argument('--a-bound', type=int, default=None)
        parser.add_argument('--depth', type=int, default=None)

    def run(self, spec, **options):
        disc = require_discriminant(spec.parse(options['D']))
        return class_number_estimate(
            disc,
            self.budget(options, 'a_bound', 'A_NORM_BOUND'),
            self.budget(options, 'depth', 'EQUIV_DEPTH'),
            workers=options['workers'],
        )

    def csv_rows(self, payload):
        return [[str(Q.a), str(Q.b), str(Q.c)] for Q in payload.representatives]
