"""
Filename: apps.py
Path: src/apps/metrics/apps.py
Description: Конфигурация приложения метрик оценки
"""
from django.apps import AppConfig


class MetricsConfig(AppConfig):
    """Конфигурация приложения metrics"""
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.metrics'
    verbose_name = 'Метрики'
