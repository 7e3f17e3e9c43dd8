"""
Filename: shapes.py
Path: src/apps/simulate/utils/shapes.py
Description: Построение формы синтетического ствола и его точечных примитивов
"""
import math

import numpy as np
from shapely.geometry import Polygon

from apps.annotation.models import PrimitiveKind
from apps.geometry.models import Ellipse
from apps.geometry.utils.polygons import largest_polygon
from apps.geometry.utils.splines import sample_spline
from apps.records.models import ComponentClass

ELLIPSE_VERTICES = 64
SECTION_AREA_POINTS = 12
SECTION_LINE_POINTS = 7


def _unit(vector):
    return vector / np.linalg.norm(vector)


def _perp(vector):
    return np.array([-vector[1], vector[0]])


def spine_points(center, direction, length, bend):
    """
    Средняя линия ствола: два конца или ломаная с изгибом в середине

    Args:
        center: Центр хорды
        direction: Направление от конца с границей к концу со срезом (рад)
        length: Длина хорды
        bend: Угол излома в середине (рад)

    Returns:
        ndarray: Вершины (2 или 3, 2)
    """
    center = np.asarray(center, dtype=float)
    axis = np.array([math.cos(direction), math.sin(direction)])
    start = center - axis * length / 2.0
    end = center + axis * length / 2.0
    if bend == 0.0:
        return np.vstack((start, end))
    middle = center + _perp(axis) * (length / 2.0) * math.tan(bend / 2.0)
    return np.vstack((start, middle, end))


def vertex_normals(spine):
    """Нормали в вершинах; во внутренних вершинах - биссектриса с поправкой на ширину"""
    directions = [_unit(spine[i + 1] - spine[i]) for i in range(len(spine) - 1)]
    normals = [_perp(directions[0])]
    for previous, following in zip(directions[:-1], directions[1:]):
        first, second = _perp(previous), _perp(following)
        bisector = _unit(first + second)
        normals.append(bisector / float(np.dot(bisector, first)))
    normals.append(_perp(directions[-1]))
    return np.asarray(normals), directions


def build_trunk(center, direction, length, radius, bend, cut_depth, with_bound, density=0.5):
    """
    Форма ствола: боковая поверхность, эллиптический срез на одном конце
    и (необязательно) полоса границы на другом

    Args:
        center: Центр хорды средней линии
        direction: Направление к срезу (рад)
        length: Длина хорды
        radius: Половина ширины
        bend: Угол излома средней линии (рад)
        cut_depth: Малая полуось среза в долях радиуса
        with_bound: Строить ли границу
        density: Плотность выборки сплайнов

    Returns:
        tuple: (dict ComponentClass -> Polygon, список (PrimitiveKind, точки), концы оси)
    """
    spine = spine_points(center, direction, length, bend)
    normals, directions = vertex_normals(spine)
    left = spine + radius * normals
    right = spine - radius * normals

    body = Polygon(np.vstack((sample_spline(left, density), sample_spline(right, density)[::-1])))

    start, end = spine[0], spine[-1]
    across = normals[-1]
    cut_ellipse = Ellipse(
        cx=float(end[0]), cy=float(end[1]),
        semi_major=radius, semi_minor=radius * cut_depth,
        rotation=math.atan2(across[1], across[0]),
    )
    cut = Polygon(cut_ellipse.outline(ELLIPSE_VERTICES))
    shapes = {ComponentClass.CUT: cut}
    primitives = [
        (PrimitiveKind.EDGE, left),
        (PrimitiveKind.EDGE, right),
        (PrimitiveKind.SECTION_AREA, cut_ellipse.outline(SECTION_AREA_POINTS)),
    ]

    side = body.difference(cut)
    if with_bound:
        t = np.linspace(0.0, math.pi, SECTION_LINE_POINTS)
        section = (start + radius * np.outer(np.cos(t), normals[0])
                   + radius * cut_depth * np.outer(np.sin(t), directions[0]))
        bound = largest_polygon(Polygon(sample_spline(section, density)).intersection(body))
        if bound is not None:
            shapes[ComponentClass.BOUND] = bound
            side = side.difference(bound)
            primitives.append((PrimitiveKind.SECTION_LINE, section))

    side = largest_polygon(side)
    shapes[ComponentClass.SIDE] = side
    marker = side.representative_point()
    primitives.append((PrimitiveKind.AREA_MARKER, np.array([[marker.x, marker.y]])))
    endpoints = (tuple(map(float, start)), tuple(map(float, end)))
    return shapes, primitives, endpoints
