"""
Filename: splines.py
Path: src/apps/geometry/utils/splines.py
Description: Центростремительный сплайн Катмулла-Рома для выборки полилиний разметки
"""
import math

import numpy as np

from ..exceptions import TooFewPoints

# 0.5 - центростремительная параметризация
ALPHA = 0.5


def _dedupe(points):
    result = [points[0]]
    for point in points[1:]:
        if math.hypot(point[0] - result[-1][0], point[1] - result[-1][1]) > 0.0:
            result.append(point)
    return result


def _segment(p0, p1, p2, p3, count):
    """
    Точки сегмента между p1 и p2 (схема Барри-Голдмана), без конечной точки

    Args:
        p0, p1, p2, p3: Контрольные точки (ndarray формы (2,))
        count: Число точек сегмента, первая совпадает с p1

    Returns:
        ndarray: Массив (count, 2)
    """
    t0 = 0.0
    t1 = t0 + np.linalg.norm(p1 - p0) ** ALPHA
    t2 = t1 + np.linalg.norm(p2 - p1) ** ALPHA
    t3 = t2 + np.linalg.norm(p3 - p2) ** ALPHA
    t = np.linspace(t1, t2, count, endpoint=False)[1:].reshape(-1, 1)

    a1 = (t1 - t) / (t1 - t0) * p0 + (t - t0) / (t1 - t0) * p1
    a2 = (t2 - t) / (t2 - t1) * p1 + (t - t1) / (t2 - t1) * p2
    a3 = (t3 - t) / (t3 - t2) * p2 + (t - t2) / (t3 - t2) * p3
    b1 = (t2 - t) / (t2 - t0) * a1 + (t - t0) / (t2 - t0) * a2
    b2 = (t3 - t) / (t3 - t1) * a2 + (t - t1) / (t3 - t1) * a3
    c = (t2 - t) / (t2 - t1) * b1 + (t - t1) / (t2 - t1) * b2
    # Контрольная точка добавляется без вычислений
    return np.vstack((p1.reshape(1, 2), c))


def _phantom(first, second, third=None):
    """Фантомная точка за концом кривой: квадратичная экстраполяция или отражение"""
    reflected = 2.0 * first - second
    if third is None:
        return reflected
    extrapolated = 3.0 * first - 3.0 * second + third
    if np.linalg.norm(extrapolated - first) <= 1e-9 * np.linalg.norm(second - first):
        return reflected
    return extrapolated


def sample_spline(polyline, density=0.5, closed=False):
    """
    Выборка интерполирующего сплайна через контрольные точки

    Args:
        polyline: Контрольные точки (не менее двух различных)
        density: Число выборок на пиксель хорды
        closed: Замкнутая кривая (последний сегмент возвращается к первой точке)

    Returns:
        ndarray: Точки кривой (M, 2); все контрольные точки входят без искажений
    """
    points = [tuple(map(float, p)) for p in polyline]
    if len(points) < 2:
        raise TooFewPoints('Для сплайна нужно минимум 2 точки')
    points = _dedupe(points)
    if closed and len(points) > 2 and points[0] == points[-1]:
        points.pop()
    minimum = 3 if closed else 2
    if len(points) < minimum:
        raise TooFewPoints(f'Для сплайна нужно минимум {minimum} различные точки')

    control = np.asarray(points, dtype=float)
    n = len(control)
    if closed:
        padded = np.vstack((control[-1], control, control[0], control[1]))
        segments = n
    else:
        third_head = control[2] if n > 2 else None
        third_tail = control[-3] if n > 2 else None
        head = _phantom(control[0], control[1], third_head)
        tail = _phantom(control[-1], control[-2], third_tail)
        padded = np.vstack((head, control, tail))
        segments = n - 1

    pieces = []
    for i in range(segments):
        p0, p1, p2, p3 = padded[i], padded[i + 1], padded[i + 2], padded[i + 3]
        chord = float(np.linalg.norm(p2 - p1))
        count = max(1, int(math.ceil(chord * density)))
        pieces.append(_segment(p0, p1, p2, p3, count))
    if not closed:
        pieces.append(control[-1].reshape(1, 2))
    return np.vstack(pieces)
