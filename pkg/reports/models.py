from django.db import models


class TimestampedModel(models.Model):
    """Base model with timestamp fields"""
    created_at = models.DateTimeField(auto_now_add=True, db_index=True)
    updated_at = models.DateTimeField(auto_now=True, db_index=True)

    class Meta:
        abstract = True


class KissRun(TimestampedModel):
    """A stored kissing-number report for one (d, D) and budget set"""
    STATUS_CHOICES = [
        ('pending', 'Pending'),
        ('running', 'Running'),
        ('completed', 'Completed'),
        ('partial', 'Partial (budget exhausted)'),
        ('failed', 'Failed'),
    ]

    d = models.PositiveSmallIntegerField(db_index=True)
    discriminant = models.CharField(max_length=255, help_text='D as "a+b*w"')
    budgets = models.JSONField(default=dict)
    status = models.CharField(max_length=20, choices=STATUS_CHOICES, default='pending', db_index=True)

    # Results
    report = models.JSONField(null=True, blank=True)
    kiss_lower = models.BigIntegerField(null=True, blank=True)
    error_message = models.TextField(blank=True)
    task_id = models.CharField(max_length=255, blank=True)

    started_at = models.DateTimeField(null=True, blank=True)
    completed_at = models.DateTimeField(null=True, blank=True)

    class Meta:
        ordering = ['-created_at']
        indexes = [
            models.Index(fields=['d', 'discriminant'], name='reports_kissrun_d_disc_idx'),
            models.Index(fields=['status', 'created_at'], name='reports_kissrun_status_idx'),
        ]

    def __str__(self):
        return f"d={self.d} D={self.discriminant} ({self.status})"

    def to_json(self):
        return {
            'id': self.pk,
            'd': self.d,
            'D': self.discriminant,
            'budgets': self.budgets,
            'status': self.status,
            'kiss_lower': self.kiss_lower,
            'report': self.report,
            'error': self.error_message or None,
            'created_at': self.created_at.isoformat() if self.created_at else None,
            'completed_at': self.completed_at.isoformat() if self.completed_at else None,
        }
