"""
URL configuration for grid_react project.

All toolkit endpoints live under ``api/`` and are routed by ``react_app.urls``.
"""
from django.urls import path, include

urlpatterns = [
    path('api/', include('react_app.urls')),
]
