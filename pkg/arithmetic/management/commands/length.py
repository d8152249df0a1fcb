from arithmetic.geom import IsometryClass, classify, complex_length, displacement, parse_trace
from arithmetic.management.base import ArithmeticCommand


class Command(ArithmeticCommand):
    help = 'Classify a trace and print the complex translation length'

    csv_columns = ('class', 'ell', 'theta', 'displacement')

    def add_command_arguments(self, parser):
        parser.add_argument('--trace', required=True, help='Trace as "re,im"')

    def run(self, spec, **options):
        tr = parse_trace(options['trace'])
        kind = classify(tr)
        if kind != IsometryClass.LOXODROMIC:
            return {'class': kind, 'ell': None, 'theta': None, 'displacement': None}
        length = complex_length(tr)
        return {'class': kind, 'ell': length.ell, 'theta': length.theta,
                'displacement': displacement(tr)}

    def csv_rows(self, payload):
        return [[payload['class'].value, payload['ell'], payload['theta'], payload['displacement']]]
