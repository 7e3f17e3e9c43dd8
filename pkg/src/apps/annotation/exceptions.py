"""
Filename: exceptions.py
Path: src/apps/annotation/exceptions.py
Description: Исключения вывода компонентов из точечной разметки
"""


class AnnotationError(ValueError):
    """Базовая ошибка разметки"""


class InvalidPrimitive(AnnotationError):
    """Примитив с неверным числом точек"""


class UnpairedEdge(AnnotationError):
    """У ствола одна кромка без замыкания"""


class MarkerOutsideRegion(AnnotationError):
    """Маркер области не попадает ни в один построенный контур ствола"""
