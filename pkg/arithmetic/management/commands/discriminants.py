from arithmetic.management.base import ArithmeticCommand
from arithmetic.pell import discriminants_up_to


class Command(ArithmeticCommand):
    help = 'List discriminants of O_d with norm up to a bound'

    csv_columns = ('D', 'norm', 'witness_x')

    def add_command_arguments(self, parser):
        parser.add_argument('--norm-bound', type=int, required=True)

    def run(self, spec, **options):
        return discriminants_up_to(spec, options['norm_bound'])

    def csv_rows(self, payload):
        return [[str(disc.D), disc.norm, str(disc.witness_x)] for disc in payload]
