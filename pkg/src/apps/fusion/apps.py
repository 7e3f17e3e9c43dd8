"""
Filename: apps.py
Path: src/apps/fusion/apps.py
Description: Конфигурация приложения слияния задач
"""
from django.apps import AppConfig


class FusionAppConfig(AppConfig):
    """Конфигурация приложения fusion"""
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.fusion'
    verbose_name = 'Слияние задач'
