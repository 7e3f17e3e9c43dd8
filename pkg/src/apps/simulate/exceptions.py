"""
Filename: exceptions.py
Path: src/apps/simulate/exceptions.py
Description: Исключения генератора сцен
"""


class InvalidSpec(ValueError):
    """Некорректная спецификация сцены или движения"""
