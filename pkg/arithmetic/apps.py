from django.apps import AppConfig


class ArithmeticConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'arithmetic'
    verbose_name = 'Imaginary quadratic arithmetic'

    def ready(self):
        from . import conf, precision
        precision.configure(dps=conf.get('WORKING_DPS'), guard=conf.get('GUARD_BAND'))
