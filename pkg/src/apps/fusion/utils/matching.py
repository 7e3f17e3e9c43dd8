"""
Filename: matching.py
Path: src/apps/fusion/utils/matching.py
Description: Сопоставление детекций OOD и ISEG и группировка компонентов в стволы
"""
import logging

import numpy as np

from apps.geometry.utils.boxes import candidate_pairs, obb_iou, segment_inside_fraction
from apps.records.models import ComponentClass

from ..models import ComponentInstance, ConfidenceMerge, UnmatchedPolicy
from .assignment import assign_with_threshold

logger = logging.getLogger(__name__)


def merge_confidence(first, second, mode):
    if mode == ConfidenceMerge.MEAN:
        return (first + second) / 2.0
    return max(first, second)


def match_tasks(ood, iseg, component, config):
    """
    Сопоставление детекций одного класса из двух задач

    Стоимость пары 1 - IoU(obb, OBB контура); пары с IoU ниже порога отбрасываются.

    Args:
        ood: Детекции OOD класса component
        iseg: Детекции ISEG класса component
        component: ComponentClass
        config: FusionConfig

    Returns:
        tuple: (пары ComponentInstance, несопоставленные OOD, несопоставленные ISEG)
    """
    cost = np.ones((len(ood), len(iseg)))
    for i, j in candidate_pairs([d.obb for d in ood], [s.contour.obb for s in iseg]):
        cost[i, j] = 1.0 - obb_iou(ood[i].obb, iseg[j].contour.obb)
    pairs, free_ood, free_iseg = assign_with_threshold(cost, 1.0 - config.task_match_min_iou)

    matched = [
        ComponentInstance(
            component=component,
            obb=ood[i].obb,
            contour=iseg[j].contour,
            confidence=merge_confidence(ood[i].confidence, iseg[j].confidence, config.confidence_merge),
            task_matched=True,
        )
        for i, j in pairs
    ]
    return matched, [ood[i] for i in free_ood], [iseg[j] for j in free_iseg]


def single_task_instance(detection):
    """ComponentInstance из детекции только одной задачи"""
    return ComponentInstance(
        component=detection.component,
        obb=detection.box,
        contour=detection.contour,
        confidence=detection.confidence,
        task_matched=False,
    )


def cut_side_affinity(cut, side):
    """
    Сродство среза и боковой поверхности

    Returns:
        float: Максимальная по сторонам side.obb доля длины стороны внутри cut.obb
    """
    return max(segment_inside_fraction(edge, cut.obb) for edge in side.obb.edges())


def bound_side_affinity(bound, side):
    """Сродство границы и боковой поверхности: стороны bound.obb внутри side.obb"""
    return max(segment_inside_fraction(edge, side.obb) for edge in bound.obb.edges())


def _pair_with_sides(items, sides, affinity, min_affinity):
    # Боксы без общих точек имеют нулевое сродство
    cost = np.ones((len(items), len(sides)))
    for i, j in candidate_pairs([item.obb for item in items], [side.obb for side in sides]):
        cost[i, j] = 1.0 - affinity(items[i], sides[j])
    pairs, free_items, _ = assign_with_threshold(cost, 1.0 - min_affinity)
    return {j: items[i] for i, j in pairs}, [items[i] for i in free_items]


def match_components(instances, config):
    """
    Группировка компонентов в стволы

    Срезы и границы сопоставляются с боковыми поверхностями независимо, каждый
    через назначение по стоимости 1 - сродство. Несопоставленные компоненты
    образуют одиночные группы; при политике require_both одиночные группы из
    компонентов, не подтвержденных обеими задачами, отбрасываются.

    Args:
        instances: Список ComponentInstance
        config: FusionConfig

    Returns:
        list: Группы в виде dict ComponentClass -> ComponentInstance
    """
    by_class = {c: [i for i in instances if i.component == c] for c in ComponentClass.parts()}
    sides = by_class[ComponentClass.SIDE]
    cut_of, free_cuts = _pair_with_sides(
        by_class[ComponentClass.CUT], sides, cut_side_affinity, config.component_match_min_affinity,
    )
    bound_of, free_bounds = _pair_with_sides(
        by_class[ComponentClass.BOUND], sides, bound_side_affinity, config.component_match_min_affinity,
    )

    groups = []
    for index, side in enumerate(sides):
        group = {ComponentClass.SIDE: side}
        if index in cut_of:
            group[ComponentClass.CUT] = cut_of[index]
        if index in bound_of:
            group[ComponentClass.BOUND] = bound_of[index]
        groups.append(group)
    groups.extend({instance.component: instance} for instance in free_cuts + free_bounds)

    if config.unmatched_policy == UnmatchedPolicy.REQUIRE_BOTH:
        kept = [
            group for group in groups
            if len(group) > 1 or next(iter(group.values())).task_matched
        ]
        if len(kept) != len(groups):
            logger.debug('Отброшено одиночных групп без подтверждения задач: %d', len(groups) - len(kept))
        groups = kept
    return groups
