from arithmetic.management.base import ArithmeticCommand
from reports.average import sarnak_average


class Command(ArithmeticCommand):
    help = 'Average class number over discriminants with |eps_D| <= x, next to Li(x^4)/(c_d x^2)'

    csv_columns = ('D', 'eps_abs', 'h_estimate', 'h_status')

    def add_command_arguments(self, parser):
        parser.add_argument('--x', type=float, required=True)
        parser.add_argument('--c-d', type=float, default=None, help='Model constant; fitted when omitted')
        parser.add_argument('--scan-norm', type=int, default=None, help='Largest N(D) scanned')
        parser.add_argument('--pell-bound', type=int, default=None)
        parser.add_argument('--a-bound', type=int, default=None)
        parser.add_argument('--depth', type=int, default=None)

    def run(self, spec, **options):
        return sarnak_average(
            spec.d,
            options['x'],
            scan_norm=self.budget(options, 'scan_norm', 'AVERAGE_SCAN_NORM'),
            pell_bound=self.budget(options, 'pell_bound', 'PELL_NORM_BOUND'),
            a_bound=self.budget(options, 'a_bound', 'A_NORM_BOUND'),
            depth=self.budget(options, 'depth', 'EQUIV_DEPTH'),
            c_d=options['c_d'],
            workers=options['workers'],
        )

    def csv_rows(self, payload):
        return [[str(e.D), e.eps_abs, e.h_estimate, e.h_status] for e in payload.found]
