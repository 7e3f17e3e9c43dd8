"""
Filename: apps.py
Path: src/apps/pipeline/apps.py
Description: Конфигурация приложения командной строки
"""
from django.apps import AppConfig


class PipelineConfig(AppConfig):
    """Конфигурация приложения pipeline"""
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.pipeline'
    verbose_name = 'Конвейер'
