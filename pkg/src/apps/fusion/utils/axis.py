"""
Filename: axis.py
Path: src/apps/fusion/utils/axis.py
Description: Средняя ось ствола по группе компонентов
"""
import math

from apps.geometry.exceptions import GeometryError
from apps.geometry.utils.ellipses import fit_ellipse
from apps.records.models import ComponentClass

from ..exceptions import EmptyGroup


def cut_center(cut):
    """
    Центр среза: центр вписанного эллипса контура, иначе центр OBB

    Центр эллипса вне cut.obb (контур и бокс от разных задач разошлись)
    заменяется центром бокса, чтобы конец оси оставался внутри огибающей.
    """
    if cut.contour is not None and len(cut.contour.vertices) >= 5:
        try:
            center = fit_ellipse(cut.contour.vertices).ellipse.center
        except GeometryError:
            center = None
        if center is not None and cut.obb.contains_point(center):
            return center
    return cut.obb.center


def bound_rim(bound, side):
    """Середина длинной стороны bound.obb, дальней от центра боковой поверхности"""
    ux, uy = bound.obb.axis
    nx, ny = -uy, ux
    half = bound.obb.height / 2.0
    candidates = (
        (bound.obb.cx + nx * half, bound.obb.cy + ny * half),
        (bound.obb.cx - nx * half, bound.obb.cy - ny * half),
    )
    return max(candidates, key=lambda p: math.hypot(p[0] - side.obb.cx, p[1] - side.obb.cy))


def _replace_nearest(endpoints, point):
    first, second = endpoints
    if math.dist(first, point) <= math.dist(second, point):
        return (tuple(point), second)
    return (first, tuple(point))


def derive_axis(group):
    """
    Концы средней оси ствола

    Args:
        group: dict ComponentClass -> ComponentInstance

    Returns:
        tuple: (endpoints, cut_center или None)
    """
    if not group:
        raise EmptyGroup('Нельзя построить ось по пустой группе')
    side = group.get(ComponentClass.SIDE)
    cut = group.get(ComponentClass.CUT)
    bound = group.get(ComponentClass.BOUND)

    if side is None:
        anchor = cut if cut is not None else bound
        endpoints = anchor.obb.short_edge_midpoints()
        return endpoints, (cut_center(cut) if cut is not None else None)

    endpoints = side.obb.short_edge_midpoints()
    if cut is not None:
        center = cut_center(cut)
        return _replace_nearest(endpoints, center), center
    if bound is not None:
        return _replace_nearest(endpoints, bound_rim(bound, side)), None
    return endpoints, None
