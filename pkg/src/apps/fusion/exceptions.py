"""
Filename: exceptions.py
Path: src/apps/fusion/exceptions.py
Description: Исключения слияния задач
"""


class FusionError(ValueError):
    """Базовая ошибка слияния"""


class EmptyGroup(FusionError):
    """Группа компонентов пуста"""
