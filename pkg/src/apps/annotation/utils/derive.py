"""
Filename: derive.py
Path: src/apps/annotation/utils/derive.py
Description: Вывод контуров компонентов ствола из точечной разметки
"""
import logging
from collections import defaultdict
from itertools import combinations

import numpy as np
from shapely.geometry import LineString, Point, Polygon
from shapely.ops import split

from apps.geometry.exceptions import GeometryError, SelfIntersection
from apps.geometry.models import Contour
from apps.geometry.utils.ellipses import fit_ellipse
from apps.geometry.utils.polygons import largest_polygon
from apps.geometry.utils.splines import sample_spline
from apps.records.models import ComponentClass

from ..exceptions import AnnotationError, MarkerOutsideRegion, UnpairedEdge
from ..models import DerivedComponents, PrimitiveKind

logger = logging.getLogger(__name__)

ELLIPSE_VERTICES = 64
# Кромка считается замкнутой, если ее концы ближе порога (px)
CLOSURE_PX = 1.0
MARKER_TOLERANCE = 1e-6


def _polygon(points, what):
    polygon = Polygon(points)
    if not polygon.is_valid or polygon.area <= 0.0:
        raise SelfIntersection(f'{what}: контур пересекает сам себя')
    return polygon


def orient_pair(first, second):
    """Разворот второй кривой так, чтобы ее начало было ближе к началу первой"""
    direct = np.linalg.norm(first[0] - second[0]) + np.linalg.norm(first[-1] - second[-1])
    crossed = np.linalg.norm(first[0] - second[-1]) + np.linalg.norm(first[-1] - second[0])
    return (first, second) if direct <= crossed else (first, second[::-1])


def ruled_region(first, second):
    """Область между двумя кромками, замкнутая прямыми отрезками на концах"""
    first, second = orient_pair(first, second)
    return Polygon(np.vstack((first, second[::-1])))


def build_body(edges, markers, trunk_id, density):
    """
    Область ствола между парой кромок

    Из пар, область которых содержит маркер, берется наименьшая по площади;
    без маркеров берутся первые две кромки. Одиночная кромка допустима только замкнутой.
    """
    curves = [sample_spline(points, density) for points in edges]
    if len(curves) == 1:
        points = np.asarray(edges[0], dtype=float)
        if len(points) >= 3 and np.linalg.norm(points[0] - points[-1]) <= CLOSURE_PX:
            return _polygon(sample_spline(points, density, closed=True), f'ствол {trunk_id}')
        raise UnpairedEdge(f'Ствол {trunk_id}: одна незамкнутая кромка')

    pairs = list(combinations(range(len(curves)), 2))
    chosen, best_area = pairs[0], None
    for i, j in pairs:
        region = ruled_region(curves[i], curves[j])
        if not region.is_valid or not any(region.covers(Point(m)) for m in markers):
            continue
        if best_area is None or region.area < best_area:
            chosen, best_area = (i, j), region.area
    if len(curves) > 2:
        logger.warning('Ствол %d: %d кромок, используется пара %s', trunk_id, len(curves), chosen)
    return _polygon(ruled_region(curves[chosen[0]], curves[chosen[1]]).exterior.coords, f'ствол {trunk_id}')


def build_cut(points, config, density):
    """Срез: эллипс по точкам области или замкнутый сплайн при большой невязке"""
    points = np.asarray(points, dtype=float)
    try:
        fit = fit_ellipse(points)
        if fit.residual <= config.ellipse_residual_frac * fit.ellipse.mean_radius:
            return Polygon(fit.ellipse.outline(ELLIPSE_VERTICES))
    except GeometryError:
        pass
    return _polygon(sample_spline(points, density, closed=True), 'срез')


def extend_polyline(points, reach):
    """Полилиния, продленная на reach по касательным на обоих концах"""
    head = points[0] - points[1]
    tail = points[-1] - points[-2]
    head = points[0] + reach * head / np.linalg.norm(head)
    tail = points[-1] + reach * tail / np.linalg.norm(tail)
    return np.vstack((head, points, tail))


def build_bound(points, body, density):
    """
    Граница: часть тела ствола, отсеченная линией обратного среза

    Линия продлевается за кромки и разрезает тело; из частей отбрасывается
    наибольшая (боковая поверхность), из остальных берется наибольшая,
    то есть часть у ближнего к линии торца. Без кромок линия замыкается хордой.
    """
    line = sample_spline(points, density)
    if body is None:
        region = Polygon(line)
        if not region.is_valid:
            raise SelfIntersection('Линия обратного среза пересекает сама себя')
        return largest_polygon(region)

    cutter = LineString(extend_polyline(line, body.length))
    if not cutter.is_simple:
        raise SelfIntersection('Линия обратного среза пересекает сама себя')
    pieces = sorted((p for p in split(body, cutter).geoms if p.area > 0.0), key=lambda p: p.area)
    if len(pieces) < 2:
        logger.warning('Линия обратного среза не разрезает ствол')
        return None
    return pieces[-2]


def _to_contour(polygon, trunk_id, component):
    try:
        return Contour.from_polygon(polygon)
    except GeometryError as exc:
        raise SelfIntersection(f'Ствол {trunk_id}, {component.value}: {exc}') from exc


def derive_trunk(trunk_id, primitives, config):
    """
    Компоненты одного ствола

    Returns:
        dict: ComponentClass -> Contour
    """
    density = config.sample_density
    by_kind = defaultdict(list)
    for primitive in primitives:
        by_kind[PrimitiveKind(primitive.kind)].append(np.asarray(primitive.points, dtype=float))
    edges = by_kind[PrimitiveKind.EDGE]
    areas = by_kind[PrimitiveKind.SECTION_AREA]
    lines = by_kind[PrimitiveKind.SECTION_LINE]
    markers = [points[0] for points in by_kind[PrimitiveKind.AREA_MARKER]]
    if not edges and not areas:
        raise AnnotationError(f'Ствол {trunk_id}: нет ни кромок, ни области среза')

    body = build_body(edges, markers, trunk_id, density) if edges else None
    shapes = {}
    if areas:
        if len(areas) > 1:
            logger.warning('Ствол %d: %d областей среза, используется первая', trunk_id, len(areas))
        shapes[ComponentClass.CUT] = build_cut(areas[0], config, density)
    if lines:
        bound = build_bound(lines[0], body, density)
        if bound is not None:
            shapes[ComponentClass.BOUND] = bound
    if body is not None:
        side = body
        for other in shapes.values():
            side = side.difference(other)
        side = largest_polygon(side)
        if side is not None:
            shapes[ComponentClass.SIDE] = side

    for marker in markers:
        point = Point(marker)
        if not any(shape.distance(point) <= MARKER_TOLERANCE for shape in shapes.values()):
            raise MarkerOutsideRegion(
                f'Ствол {trunk_id}: маркер ({marker[0]:.1f}, {marker[1]:.1f}) вне построенных контуров'
            )
    order = {c: i for i, c in enumerate(ComponentClass.parts())}
    return {
        component: _to_contour(shapes[component], trunk_id, component)
        for component in sorted(shapes, key=order.get)
    }


def split_live_trees(primitives):
    """Группы примитивов ID 0: по одной паре кромок на маркер"""
    edges = [p for p in primitives if p.kind == PrimitiveKind.EDGE]
    markers = [p for p in primitives if p.kind == PrimitiveKind.AREA_MARKER]
    if not markers:
        return [edges] if edges else []
    groups = []
    for marker in markers:
        groups.append(edges + [marker])
    return groups


def derive_components(primitives, config):
    """
    Контуры компонентов по точечной разметке

    Args:
        primitives: Список PointPrimitive
        config: AnnotationConfig

    Returns:
        DerivedComponents: (trunk_id, {ComponentClass: Contour}) и предупреждения
    """
    grouped = defaultdict(list)
    for primitive in primitives:
        grouped[primitive.trunk_id].append(primitive)

    trunks, warnings = [], []
    for trunk_id in sorted(grouped):
        groups = split_live_trees(grouped[trunk_id]) if trunk_id == 0 else [grouped[trunk_id]]
        for group in groups:
            components = derive_trunk(trunk_id, group, config)
            for component, contour in components.items():
                width = contour.obb.height
                if width < config.min_component_width_px:
                    message = (f'Ствол {trunk_id}, {component.value}: ширина {width:.1f} px '
                               f'меньше {config.min_component_width_px:g} px')
                    logger.warning(message)
                    warnings.append(message)
            trunks.append((trunk_id, components))
    return DerivedComponents(trunks=tuple(trunks), warnings=tuple(warnings))

