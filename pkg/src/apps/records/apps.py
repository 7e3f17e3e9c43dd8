"""
Filename: apps.py
Path: src/apps/records/apps.py
Description: Конфигурация приложения форматов данных
"""
from django.apps import AppConfig


class RecordsConfig(AppConfig):
    """Конфигурация приложения records"""
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.records'
    verbose_name = 'Записи и форматы'
