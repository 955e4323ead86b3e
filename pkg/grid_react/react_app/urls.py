from django.urls import include, path
from rest_framework.routers import DefaultRouter

from . import views

router = DefaultRouter()
router.register(r'react', views.ReactViewSet, basename='react')

urlpatterns = [
    path('', include(router.urls)),
]
