"""
Filename: models.py
Path: src/apps/geometry/models.py
Description: Геометрические примитивы в пиксельных координатах изображения
"""
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from shapely.geometry import LinearRing, Polygon

from .exceptions import DegenerateGeometry, NonPositiveExtent, SelfIntersection, TooFewPoints


def shoelace_area(vertices):
    """
    Знаковая площадь многоугольника по формуле шнурков

    Args:
        vertices: Последовательность вершин (x, y)

    Returns:
        float: Положительная для обхода против часовой стрелки
    """
    area = 0.0
    n = len(vertices)
    for i in range(n):
        x0, y0 = vertices[i]
        x1, y1 = vertices[(i + 1) % n]
        area += x0 * y1 - x1 * y0
    return area / 2.0


@dataclass(frozen=True)
class OrientedBox:
    """
    Повернутый прямоугольник (OBB)
    Угол в радианах, каноническая форма: angle в [0, pi), width >= height
    """
    cx: float
    cy: float
    width: float
    height: float
    angle: float

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise NonPositiveExtent(
                f'Размеры бокса должны быть положительными: width={self.width}, height={self.height}'
            )

    @classmethod
    def from_list(cls, values):
        cx, cy, width, height, angle = (float(v) for v in values)
        return cls(cx, cy, width, height, angle)

    def to_list(self):
        return [self.cx, self.cy, self.width, self.height, self.angle]

    @property
    def center(self):
        return (self.cx, self.cy)

    @property
    def area(self):
        return self.width * self.height

    @property
    def axis(self):
        """Единичный вектор вдоль ширины"""
        return (math.cos(self.angle), math.sin(self.angle))

    @cached_property
    def corners(self):
        """Четыре угла против часовой стрелки"""
        c, s = math.cos(self.angle), math.sin(self.angle)
        dx, dy = self.width / 2.0, self.height / 2.0
        return tuple(
            (self.cx + x * c - y * s, self.cy + x * s + y * c)
            for x, y in ((-dx, -dy), (dx, -dy), (dx, dy), (-dx, dy))
        )

    @property
    def radius(self):
        """Половина диагонали"""
        return math.hypot(self.width, self.height) / 2.0

    def edges(self):
        corners = self.corners
        return [Segment(corners[i], corners[(i + 1) % 4]) for i in range(4)]

    def short_edge_midpoints(self):
        """Середины коротких сторон (концы средней оси)"""
        ux, uy = self.axis
        half = self.width / 2.0
        return (
            (self.cx - ux * half, self.cy - uy * half),
            (self.cx + ux * half, self.cy + uy * half),
        )

    def contains_point(self, point, slack=0.0):
        ux, uy = self.axis
        px, py = point[0] - self.cx, point[1] - self.cy
        along = px * ux + py * uy
        across = -px * uy + py * ux
        return (abs(along) <= self.width / 2.0 + slack
                and abs(across) <= self.height / 2.0 + slack)

    def to_polygon(self):
        return Polygon(self.corners)


@dataclass(frozen=True)
class Segment:
    """Отрезок между двумя точками"""
    p0: tuple
    p1: tuple

    @property
    def length(self):
        return math.hypot(self.p1[0] - self.p0[0], self.p1[1] - self.p0[1])


@dataclass(frozen=True)
class Contour:
    """
    Простой замкнутый контур против часовой стрелки
    Вершины хранятся без повтора первой точки в конце
    """
    vertices: tuple

    def __post_init__(self):
        if len(self.vertices) < 3:
            raise TooFewPoints(f'Контур требует минимум 3 вершины, получено {len(self.vertices)}')
        if shoelace_area(self.vertices) <= 0.0:
            raise DegenerateGeometry('Контур должен иметь положительную площадь при обходе против часовой стрелки')
        if not LinearRing(self.vertices).is_simple:
            raise SelfIntersection('Контур пересекает сам себя')

    @classmethod
    def from_points(cls, points):
        """
        Построение контура из произвольного обхода

        Args:
            points: Вершины (x, y), допускается замыкающая точка и обход по часовой стрелке

        Returns:
            Contour: Контур против часовой стрелки
        """
        vertices = [(float(x), float(y)) for x, y in points]
        if len(vertices) > 1 and vertices[0] == vertices[-1]:
            vertices.pop()
        if len(vertices) >= 3 and shoelace_area(vertices) < 0.0:
            vertices.reverse()
        return cls(tuple(vertices))

    @classmethod
    def from_polygon(cls, polygon):
        return cls.from_points(polygon.exterior.coords)

    def to_list(self):
        return [[x, y] for x, y in self.vertices]

    def as_array(self):
        return np.asarray(self.vertices, dtype=float)

    @property
    def area(self):
        return shoelace_area(self.vertices)

    @property
    def bounds(self):
        xs = [x for x, _ in self.vertices]
        ys = [y for _, y in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)

    @cached_property
    def polygon(self):
        return Polygon(self.vertices)

    @cached_property
    def obb(self):
        """Описанный бокс минимальной площади"""
        from .utils.calipers import min_area_obb
        return min_area_obb(self.vertices)


@dataclass(frozen=True)
class Ellipse:
    """Эллипс с полуосями и углом поворота большой оси"""
    cx: float
    cy: float
    semi_major: float
    semi_minor: float
    rotation: float

    def __post_init__(self):
        if not (self.semi_major >= self.semi_minor > 0):
            raise NonPositiveExtent(
                f'Некорректные полуоси эллипса: {self.semi_major}, {self.semi_minor}'
            )

    @property
    def center(self):
        return (self.cx, self.cy)

    @property
    def mean_radius(self):
        return (self.semi_major + self.semi_minor) / 2.0

    def outline(self, count=64):
        """Точки контура эллипса против часовой стрелки"""
        t = np.linspace(0.0, 2.0 * np.pi, count, endpoint=False)
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        x = self.semi_major * np.cos(t)
        y = self.semi_minor * np.sin(t)
        return np.column_stack((self.cx + x * c - y * s, self.cy + x * s + y * c))

    def to_contour(self, count=64):
        return Contour.from_points(self.outline(count).tolist())


@dataclass(frozen=True)
class EllipseFit:
    """Результат аппроксимации эллипсом с RMS-невязкой в пикселях"""
    ellipse: Ellipse
    residual: float
