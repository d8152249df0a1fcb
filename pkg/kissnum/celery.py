import os

from celery import Celery

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'kissnum.settings')

app = Celery('kissnum')
app.config_from_object('django.conf:settings', namespace='CELERY')
app.autodiscover_tasks()
