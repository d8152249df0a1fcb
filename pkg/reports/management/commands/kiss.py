from django.utils import timezone

from arithmetic.exceptions import BudgetExhausted
from arithmetic.management.base import ArithmeticCommand
from arithmetic.serializers import to_payload
from reports.models import KissRun
from reports.pipeline import Budgets, kiss_lower_bound

CSV_FIELDS = (
    'status', 'm', 't_m', 'u_m', 'tau', 'sl2_order', 'group_order', 'stabilizer_order', 'stabilizer_flag',
    'classes_verified', 'kiss_lower', 'kiss_lower_uniform', 'kiss_lower_certified', 'floor_taken',
    'conditional_on_h', 'systole', 'manifold_volume', 'diagnostic_exponent',
)


class Command(ArithmeticCommand):
    help = 'Kissing-number lower bound for the manifold attached to a discriminant D'

    csv_columns = ('field', 'value')

    def add_command_arguments(self, parser):
        parser.add_argument('--D', required=True, help='Discriminant as "a+b*w"')
        parser.add_argument('--pell-bound', type=int, default=None, help='Norm bound for the Pell search')
        parser.add_argument('--a-bound', type=int, default=None, help='Norm bound on the leading coefficient a')
        parser.add_argument('--depth', type=int, default=None, help='Word length for equivalence searches')
        parser.add_argument('--m-cap', type=int, default=None)
        parser.add_argument('--certify-height', type=int, default=None,
                            help='Also certify the systole up to this entry-norm height')
        parser.add_argument('--save', action='store_true', help='Store the report as a KissRun')

    def run(self, spec, **options):
        D = spec.parse(options['D'])
        budgets = Budgets.from_settings(
            pell_bound=options['pell_bound'],
            a_bound=options['a_bound'],
            depth=options['depth'],
            m_cap=options['m_cap'],
            certify_height=options['certify_height'],
            workers=options['workers'],
        )
        report = kiss_lower_bound(spec.d, D, budgets)
        if options['save']:
            self.save(report)
        if not report.complete:
            raise BudgetExhausted(report.reason or 'budget exhausted', partial=report)
        if report.floor_taken:
            self.stderr.write(self.style.WARNING('h |G| / 2(m+1) is not an integer; floor taken'))
        return report

    def save(self, report):
        payload = to_payload(report)
        run = KissRun.objects.create(
            d=report.d,
            discriminant=str(report.D),
            budgets=report.budgets.to_json(),
            status='completed' if report.complete else 'partial',
            report=payload,
            kiss_lower=report.kiss_lower,
            error_message=report.reason,
            started_at=timezone.now(),
            completed_at=timezone.now(),
        )
        self.stderr.write(self.style.SUCCESS(f"Saved kiss run {run.pk}"))

    def csv_rows(self, payload):
        data = to_payload(payload)
        rows = [['D', str(payload.D)]]
        for name in CSV_FIELDS:
            value = data[name]
            if isinstance(value, dict) and 'a' in value:
                value = str(getattr(payload, name))
            rows.append([name, '' if value is None else value])
        return rows
