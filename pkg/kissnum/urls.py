from django.contrib import admin
from django.http import JsonResponse
from django.urls import include, path


def home(request):
    return JsonResponse({
        'service': 'kissnum',
        'endpoints': ['/reports/length/', '/reports/level/', '/reports/kiss/'],
    })


urlpatterns = [
    path('admin/', admin.site.urls),
    path('', home, name='home'),
    path('reports/', include('reports.urls')),
]
