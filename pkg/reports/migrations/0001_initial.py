# Generated by Django 4.2.8 on 2026-10-17 09:12

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='KissRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('created_at', models.DateTimeField(auto_now_add=True, db_index=True)),
                ('updated_at', models.DateTimeField(auto_now=True, db_index=True)),
                ('d', models.PositiveSmallIntegerField(db_index=True)),
                ('discriminant', models.CharField(help_text='D as "a+b*w"', max_length=255)),
                ('budgets', models.JSONField(default=dict)),
                ('status', models.CharField(choices=[('pending', 'Pending'), ('running', 'Running'), ('completed', 'Completed'), ('partial', 'Partial (budget exhausted)'), ('failed', 'Failed')], db_index=True, default='pending', max_length=20)),
                ('report', models.JSONField(blank=True, null=True)),
                ('kiss_lower', models.BigIntegerField(blank=True, null=True)),
                ('error_message', models.TextField(blank=True)),
                ('task_id', models.CharField(blank=True, max_length=255)),
                ('started_at', models.DateTimeField(blank=True, null=True)),
                ('completed_at', models.DateTimeField(blank=True, null=True)),
            ],
            options={
                'ordering': ['-created_at'],
                'indexes': [models.Index(fields=['d', 'discriminant'], name='reports_kissrun_d_disc_idx'), models.Index(fields=['status', 'created_at'], name='reports_kissrun_status_idx')],
            },
        ),
    ]
