"""
Filename: apps.py
Path: src/apps/geometry/apps.py
Description: Конфигурация приложения геометрических примитивов
"""
from django.apps import AppConfig


class GeometryConfig(AppConfig):
    """Конфигурация приложения geometry"""
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.geometry'
    verbose_name = 'Геометрия'
