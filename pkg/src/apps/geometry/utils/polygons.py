"""
Filename: polygons.py
Path: src/apps/geometry/utils/polygons.py
Description: Переход от результатов операций shapely к простым контурам
"""
from shapely.geometry import MultiPolygon, Polygon

from ..exceptions import GeometryError
from ..models import Contour


def largest_polygon(geometry):
    """
    Наибольший по площади многоугольник результата операции shapely

    Returns:
        Polygon или None, если площадь нулевая
    """
    if geometry is None or geometry.is_empty:
        return None
    if isinstance(geometry, Polygon):
        candidates = [geometry]
    elif isinstance(geometry, MultiPolygon):
        candidates = list(geometry.geoms)
    else:
        candidates = [g for g in getattr(geometry, 'geoms', []) if isinstance(g, Polygon)]
    candidates = [c for c in candidates if c.area > 0.0]
    if not candidates:
        return None
    return max(candidates, key=lambda polygon: polygon.area)


def to_contour(geometry, min_area=0.0):
    """
    Контур наибольшей части геометрии

    Args:
        geometry: Результат операции shapely
        min_area: Части меньшей площади отбрасываются

    Returns:
        Contour или None
    """
    polygon = largest_polygon(geometry)
    if polygon is None or polygon.area <= min_area:
        return None
    try:
        return Contour.from_polygon(polygon)
    except GeometryError:
        return None
