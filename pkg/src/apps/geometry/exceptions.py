"""
Filename: exceptions.py
Path: src/apps/geometry/exceptions.py
Description: Исключения геометрических операций
"""


class GeometryError(ValueError):
    """Базовая ошибка геометрии"""


class NonPositiveExtent(GeometryError):
    """Ширина или высота бокса не положительна"""


class DegenerateGeometry(GeometryError):
    """Вырожденный набор точек (коллинеарные, менее трех)"""


class ZeroLengthSegment(GeometryError):
    """Отрезок нулевой длины"""


class TooFewPoints(GeometryError):
    """Недостаточно точек для построения"""


class NotAnEllipse(GeometryError):
    """Коника вырождается в гиперболу или параболу"""


class EmptyInput(GeometryError):
    """Пустой список входных объектов"""


class SelfIntersection(GeometryError):
    """Контур пересекает сам себя"""
