"""
Filename: export.py
Path: src/apps/annotation/utils/export.py
Description: Экспорт выведенных компонентов в разметку и OBB-цели по вариантам классов
"""
import logging

from shapely.geometry import box as shapely_box
from shapely.ops import unary_union

from apps.geometry.utils.polygons import to_contour
from apps.records.models import ComponentClass, GroundTruthFrame, GroundTruthInstance

from ..models import ExportVariant

logger = logging.getLogger(__name__)


def export_components(components, variant):
    """
    Набор контуров одного ствола для варианта экспорта

    Args:
        components: dict ComponentClass -> Contour
        variant: ExportVariant

    Returns:
        dict: ComponentClass -> Contour
    """
    variant = ExportVariant(variant)
    if variant == ExportVariant.THREE_CLASS:
        return dict(components)
    if variant == ExportVariant.TWO_CLASS:
        return {c: contour for c, contour in components.items() if c != ComponentClass.BOUND}
    merged = to_contour(unary_union([contour.polygon for contour in components.values()]))
    return {ComponentClass.TRUNK: merged} if merged is not None else {}


def _clip(components, frame_box):
    clipped = {}
    for component, contour in components.items():
        inside = to_contour(contour.polygon.intersection(frame_box))
        if inside is not None:
            clipped[component] = inside
    return clipped


def export_ground_truth(derived, variant, frame_id=0, timestamp_s=0.0, image_size=None, scene=None):
    """
    Кадр разметки и OBB-цели из выведенных компонентов

    Args:
        derived: DerivedComponents
        variant: ExportVariant
        frame_id: Номер кадра
        timestamp_s: Метка времени
        image_size: (ширина, высота), контуры обрезаются по кадру
        scene: SceneParameters

    Returns:
        tuple: (GroundTruthFrame, список (trunk_id, класс, OrientedBox))
    """
    frame_box = shapely_box(0.0, 0.0, *image_size) if image_size is not None else None
    instances, targets = [], []
    for trunk_id, components in derived.trunks:
        exported = export_components(components, variant)
        if frame_box is not None:
            exported = _clip(exported, frame_box)
        if not exported:
            logger.warning('Ствол %d: после экспорта не осталось компонентов', trunk_id)
            continue
        instances.append(GroundTruthInstance(trunk_id=trunk_id, components=exported))
        targets.extend((trunk_id, component, contour.obb) for component, contour in exported.items())
    frame = GroundTruthFrame(
        frame_id=frame_id,
        timestamp_s=timestamp_s,
        instances=tuple(instances),
        scene=scene,
        image_size=tuple(image_size) if image_size is not None else None,
    )
    return frame, targets
