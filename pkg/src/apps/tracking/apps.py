"""
Filename: apps.py
Path: src/apps/tracking/apps.py
Description: Конфигурация приложения трекинга стволов
"""
from django.apps import AppConfig


class TrackingConfig(AppConfig):
    """Конфигурация приложения tracking"""
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.tracking'
    verbose_name = 'Трекинг'
