from django.urls import path

from . import views

app_name = 'reports'

urlpatterns = [
    path('length/', views.length_view, name='length'),
    path('level/', views.level_view, name='level'),
    path('kiss/', views.kiss_create, name='kiss_create'),
    path('kiss/<int:run_id>/', views.kiss_detail, name='kiss_detail'),
]
