"""
Filename: apps.py
Path: src/apps/simulate/apps.py
Description: Конфигурация приложения синтетических сцен
"""
from django.apps import AppConfig


class SimulateConfig(AppConfig):
    """Конфигурация приложения simulate"""
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.simulate'
    verbose_name = 'Симулятор'
