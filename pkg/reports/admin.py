from django.contrib import admin

from .models import KissRun


@admin.register(KissRun)
class KissRunAdmin(admin.ModelAdmin):
    list_display = ('id', 'd', 'discriminant', 'status', 'kiss_lower', 'created_at')
    list_filter = ('status', 'd')
    search_fields = ('discriminant', 'task_id')
    readonly_fields = ('report', 'created_at', 'updated_at', 'started_at', 'completed_at')
