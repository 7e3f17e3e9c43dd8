"""
Filename: boxes.py
Path: src/apps/geometry/utils/boxes.py
Description: Алгебра повернутых боксов: каноническая форма, IoU, отсечение отрезков, огибающая
"""
import math

import numpy as np

from ..exceptions import EmptyInput, ZeroLengthSegment
from ..models import OrientedBox, shoelace_area
from .calipers import min_area_obb

# Допуск на принадлежность вершины полуплоскости при отсечении
CLIP_EPS = 1e-12


def canonicalize_obb(box):
    """
    Приведение бокса к канонической форме

    Args:
        box: OrientedBox с положительными размерами

    Returns:
        OrientedBox: angle в [0, pi), width >= height
    """
    width, height, angle = box.width, box.height, box.angle
    if width < height:
        width, height = height, width
        angle += math.pi / 2.0
    angle = math.fmod(angle, math.pi)
    if angle < 0.0:
        angle += math.pi
    if angle >= math.pi - 1e-15:
        angle = 0.0
    if (width, height, angle) == (box.width, box.height, box.angle):
        return box
    return OrientedBox(box.cx, box.cy, width, height, angle)


def _side(a, b, p):
    return (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])


def clip_convex(subject, clipper):
    """
    Отсечение выпуклого многоугольника выпуклым (Сазерленд-Ходжмен)

    Args:
        subject: Вершины отсекаемого многоугольника против часовой стрелки
        clipper: Вершины отсекающего многоугольника против часовой стрелки

    Returns:
        list: Вершины пересечения (может быть пустым)
    """
    output = list(subject)
    n = len(clipper)
    for i in range(n):
        if not output:
            break
        a, b = clipper[i], clipper[(i + 1) % n]
        scale = abs(b[0] - a[0]) + abs(b[1] - a[1])
        eps = CLIP_EPS * scale * scale
        points, output = output, []
        s = points[-1]
        ds = _side(a, b, s)
        for e in points:
            de = _side(a, b, e)
            if de >= -eps:
                if ds < -eps:
                    t = ds / (ds - de)
                    output.append((s[0] + t * (e[0] - s[0]), s[1] + t * (e[1] - s[1])))
                output.append(e)
            elif ds >= -eps:
                t = ds / (ds - de)
                output.append((s[0] + t * (e[0] - s[0]), s[1] + t * (e[1] - s[1])))
            s, ds = e, de
    return output


def obb_intersection_area(a, b):
    if math.hypot(a.cx - b.cx, a.cy - b.cy) > a.radius + b.radius:
        return 0.0
    polygon = clip_convex(a.corners, b.corners)
    if len(polygon) < 3:
        return 0.0
    return max(shoelace_area(polygon), 0.0)


def obb_iou(a, b):
    """
    IoU двух повернутых боксов через отсечение выпуклых четырехугольников

    Args:
        a: Первый бокс
        b: Второй бокс

    Returns:
        float: Значение в [0, 1]
    """
    if a == b:
        return 1.0
    inter = obb_intersection_area(a, b)
    if inter <= 0.0:
        return 0.0
    union = a.area + b.area - inter
    return min(max(inter / union, 0.0), 1.0)


def segment_inside_fraction(seg, box):
    """
    Доля длины отрезка внутри бокса (отсечение Лианга-Барски в системе бокса)

    Args:
        seg: Segment ненулевой длины
        box: OrientedBox

    Returns:
        float: Значение в [0, 1]
    """
    if seg.length <= 0.0:
        raise ZeroLengthSegment('Отрезок нулевой длины')
    ux, uy = box.axis
    x0, y0 = seg.p0[0] - box.cx, seg.p0[1] - box.cy
    x1, y1 = seg.p1[0] - box.cx, seg.p1[1] - box.cy
    # Координаты в системе бокса: вдоль ширины и поперек
    a0, b0 = x0 * ux + y0 * uy, -x0 * uy + y0 * ux
    a1, b1 = x1 * ux + y1 * uy, -x1 * uy + y1 * ux
    t_enter, t_exit = 0.0, 1.0
    for p0, d, half in ((a0, a1 - a0, box.width / 2.0), (b0, b1 - b0, box.height / 2.0)):
        for p, q in ((-d, p0 + half), (d, half - p0)):
            if p == 0.0:
                if q < 0.0:
                    return 0.0
                continue
            t = q / p
            if p < 0.0:
                t_enter = max(t_enter, t)
            else:
                t_exit = min(t_exit, t)
    return min(max(t_exit - t_enter, 0.0), 1.0)


def envelope_obb(boxes):
    """
    Огибающий бокс минимальной площади для набора боксов

    Args:
        boxes: Непустой список OrientedBox

    Returns:
        OrientedBox: Канонический бокс, содержащий все входные
    """
    boxes = list(boxes)
    if not boxes:
        raise EmptyInput('Для огибающей нужен хотя бы один бокс')
    if len(boxes) == 1:
        return canonicalize_obb(boxes[0])
    points = [corner for box in boxes for corner in box.corners]
    return min_area_obb(points)


def candidate_pairs(first, second):
    """
    Пары боксов, описанные окружности которых пересекаются

    Args:
        first: Последовательность OrientedBox
        second: Последовательность OrientedBox

    Returns:
        list: Пары индексов (i, j) в порядке возрастания
    """
    if not first or not second:
        return []
    a = np.array([(box.cx, box.cy, box.radius) for box in first])
    b = np.array([(box.cx, box.cy, box.radius) for box in second])
    distance = np.hypot(a[:, None, 0] - b[None, :, 0], a[:, None, 1] - b[None, :, 1])
    rows, cols = np.nonzero(distance <= a[:, None, 2] + b[None, :, 2])
    return list(zip(rows.tolist(), cols.tolist()))
