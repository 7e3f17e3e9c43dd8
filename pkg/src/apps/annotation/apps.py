"""
Filename: apps.py
Path: src/apps/annotation/apps.py
Description: Конфигурация приложения вывода разметки
"""
from django.apps import AppConfig


class AnnotationConfig(AppConfig):
    """Конфигурация приложения annotation"""
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.annotation'
    verbose_name = 'Разметка'
