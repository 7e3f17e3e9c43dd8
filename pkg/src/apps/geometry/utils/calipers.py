"""
Filename: calipers.py
Path: src/apps/geometry/utils/calipers.py
Description: Описанный прямоугольник минимальной площади (вращающиеся калиперы по выпуклой оболочке)
"""
import math

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from ..exceptions import DegenerateGeometry
from ..models import OrientedBox

HALF_PI = math.pi / 2.0


def convex_hull(points):
    """
    Вершины выпуклой оболочки против часовой стрелки

    Args:
        points: Массив точек (N, 2)

    Returns:
        ndarray: Вершины оболочки
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[0] < 3:
        raise DegenerateGeometry('Нужно минимум 3 точки')
    try:
        hull = ConvexHull(points)
    except QhullError as exc:
        raise DegenerateGeometry('Точки коллинеарны или совпадают') from exc
    if hull.volume <= 0.0:
        raise DegenerateGeometry('Оболочка имеет нулевую площадь')
    return points[hull.vertices]


def min_area_obb(points):
    """
    Бокс минимальной площади, содержащий все точки

    Перебираются направления ребер оболочки: оптимальный прямоугольник
    всегда имеет сторону, коллинеарную одному из ребер.

    Args:
        points: Не менее трех неколлинеарных точек

    Returns:
        OrientedBox: Канонический бокс
    """
    hull = convex_hull(points)
    edges = np.roll(hull, -1, axis=0) - hull
    angles = np.mod(np.arctan2(edges[:, 1], edges[:, 0]), HALF_PI)
    angles[np.isclose(angles, HALF_PI, rtol=0.0, atol=1e-12)] = 0.0
    angles = np.unique(angles)

    cos, sin = np.cos(angles), np.sin(angles)
    # Проекции вершин на оси каждого кандидата: (K, N)
    along = np.outer(cos, hull[:, 0]) + np.outer(sin, hull[:, 1])
    across = -np.outer(sin, hull[:, 0]) + np.outer(cos, hull[:, 1])
    a_min, a_max = along.min(axis=1), along.max(axis=1)
    b_min, b_max = across.min(axis=1), across.max(axis=1)
    areas = (a_max - a_min) * (b_max - b_min)
    best = int(np.argmin(areas))

    theta = float(angles[best])
    a_mid = (a_min[best] + a_max[best]) / 2.0
    b_mid = (b_min[best] + b_max[best]) / 2.0
    c, s = math.cos(theta), math.sin(theta)
    width = float(a_max[best] - a_min[best])
    height = float(b_max[best] - b_min[best])
    cx = a_mid * c - b_mid * s
    cy = a_mid * s + b_mid * c
    if width < height:
        width, height, theta = height, width, theta + HALF_PI
    return OrientedBox(float(cx), float(cy), width, height, theta)
