"""
Filename: raster.py
Path: src/apps/metrics/utils/raster.py
Description: Растеризация контуров и боксов на общей сетке, IoU масок и покомпонентный IoU
"""
import math
from dataclasses import dataclass

import numpy as np
from PIL import Image, ImageDraw

from apps.geometry.models import Contour, OrientedBox
from apps.records.models import ComponentClass

from ..exceptions import EmptyInstances


@dataclass(frozen=True)
class RasterGrid:
    """
    Сетка растеризации: размер в пикселях и преобразование координат
    pixel = (point - origin) * scale
    """
    width: int
    height: int
    scale: float = 1.0
    origin: tuple = (0.0, 0.0)

    @classmethod
    def for_frame(cls, image_size=None, shapes=(), raster_size=1024):
        """
        Сетка кадра: разрешение изображения, если оно известно,
        иначе квадрат raster_size по охвату всех форм
        """
        if image_size is not None:
            return cls(int(image_size[0]), int(image_size[1]))
        points = np.array([p for shape in shapes for p in _vertices(shape)], dtype=float)
        if not len(points):
            return cls(raster_size, raster_size)
        low, high = points.min(axis=0), points.max(axis=0)
        extent = float(max(high - low)) or 1.0
        return cls(raster_size, raster_size, scale=(raster_size - 1) / extent, origin=(float(low[0]), float(low[1])))

    def to_pixels(self, points):
        points = np.asarray(points, dtype=float)
        return (points - np.asarray(self.origin)) * self.scale


@dataclass(frozen=True, eq=False)
class Mask:
    """Бинарная маска в окне сетки с началом (x0, y0)"""
    x0: int
    y0: int
    array: np.ndarray

    @property
    def area(self):
        return int(self.array.sum())

    @property
    def x1(self):
        return self.x0 + self.array.shape[1]

    @property
    def y1(self):
        return self.y0 + self.array.shape[0]

    def _window(self, x0, y0, x1, y1):
        return self.array[y0 - self.y0:y1 - self.y0, x0 - self.x0:x1 - self.x0]

    def intersection_area(self, other):
        x0, y0 = max(self.x0, other.x0), max(self.y0, other.y0)
        x1, y1 = min(self.x1, other.x1), min(self.y1, other.y1)
        if x0 >= x1 or y0 >= y1:
            return 0
        return int(np.logical_and(self._window(x0, y0, x1, y1), other._window(x0, y0, x1, y1)).sum())

    def union(self, other):
        if not other.array.size:
            return self
        if not self.array.size:
            return other
        x0, y0 = min(self.x0, other.x0), min(self.y0, other.y0)
        x1, y1 = max(self.x1, other.x1), max(self.y1, other.y1)
        array = np.zeros((y1 - y0, x1 - x0), dtype=bool)
        for mask in (self, other):
            array[mask.y0 - y0:mask.y1 - y0, mask.x0 - x0:mask.x1 - x0] |= mask.array
        return Mask(x0, y0, array)


EMPTY_MASK = Mask(0, 0, np.zeros((0, 0), dtype=bool))


def _vertices(shape):
    if isinstance(shape, OrientedBox):
        return shape.corners
    if isinstance(shape, Contour):
        return shape.vertices
    return shape


def rasterize(shape, grid):
    """
    Маска контура или бокса на сетке

    Пиксель (i, j) соответствует точке (i, j) сетки; граница многоугольника
    включается в маску.
    """
    pixels = grid.to_pixels(_vertices(shape))
    x0 = max(int(math.floor(pixels[:, 0].min())), 0)
    y0 = max(int(math.floor(pixels[:, 1].min())), 0)
    x1 = min(int(math.ceil(pixels[:, 0].max())) + 1, grid.width)
    y1 = min(int(math.ceil(pixels[:, 1].max())) + 1, grid.height)
    if x0 >= x1 or y0 >= y1:
        return EMPTY_MASK
    image = Image.new('L', (x1 - x0, y1 - y0), 0)
    ImageDraw.Draw(image).polygon([(float(x) - x0, float(y) - y0) for x, y in pixels], fill=1)
    return Mask(x0, y0, np.asarray(image, dtype=bool))


def mask_iou(a, b):
    """IoU двух масок; две пустые маски дают 0"""
    inter = a.intersection_area(b)
    union = a.area + b.area - inter
    return inter / union if union else 0.0


def component_masks(components, grid, merge=False):
    """
    Маски компонентов экземпляра

    Args:
        components: dict класс -> Contour или OrientedBox
        grid: RasterGrid
        merge: Объединить все компоненты в один класс Trunk

    Returns:
        dict: ComponentClass -> Mask
    """
    masks = {ComponentClass(c): rasterize(shape, grid) for c, shape in components.items()}
    if merge and masks:
        merged = EMPTY_MASK
        for mask in masks.values():
            merged = merged.union(mask)
        return {ComponentClass.TRUNK: merged}
    return masks


def iou_c_masks(gt_masks, pred_masks):
    """
    Покомпонентный IoU: сумма пересечений по классам, деленная на сумму объединений

    Класс, отсутствующий с одной стороны, добавляет площадь другой стороны
    только в знаменатель.
    """
    labels = set(gt_masks) | set(pred_masks)
    if not labels:
        raise EmptyInstances('Нет компонентов ни в разметке, ни в предсказании')
    inter_sum, union_sum = 0, 0
    for label in labels:
        gt, pred = gt_masks.get(label), pred_masks.get(label)
        if gt is None or pred is None:
            union_sum += (gt if gt is not None else pred).area
            continue
        inter = gt.intersection_area(pred)
        inter_sum += inter
        union_sum += gt.area + pred.area - inter
    return inter_sum / union_sum if union_sum else 0.0


def trunk_shapes(trunk):
    """Формы компонентов объединенного ствола: контур, если есть, иначе OBB"""
    return {
        component: instance.contour if instance.contour is not None else instance.obb
        for component, instance in trunk.components.items()
    }


def iou_c(gt, pred, grid):
    """
    Покомпонентный IoU экземпляра разметки и объединенного ствола

    Если разметка содержит только класс Trunk, компоненты предсказания
    объединяются в одну маску.

    Args:
        gt: GroundTruthInstance
        pred: UnifiedTrunk
        grid: RasterGrid

    Returns:
        float: Значение в [0, 1]
    """
    merge = set(gt.components) == {ComponentClass.TRUNK}
    return iou_c_masks(component_masks(gt.components, grid), component_masks(trunk_shapes(pred), grid, merge))
