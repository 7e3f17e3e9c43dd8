"""
Filename: pipeline.py
Path: src/apps/fusion/utils/pipeline.py
Description: Слияние детекций кадра в объединенные стволы
"""
import logging

from apps.geometry.utils.boxes import envelope_obb
from apps.records.models import ComponentClass, SourceTask

from ..models import FusedFrame, UnifiedTrunk
from .axis import derive_axis
from .matching import match_components, match_tasks, single_task_instance

logger = logging.getLogger(__name__)


def _order_key(detection):
    box = detection.box
    return (-detection.confidence, box.cx, box.cy, box.width, box.height, box.angle)


def build_trunk(group):
    """UnifiedTrunk из группы компонентов"""
    endpoints, center = derive_axis(group)
    return UnifiedTrunk(
        envelope=envelope_obb([instance.obb for instance in group.values()]),
        endpoints=tuple(tuple(float(v) for v in p) for p in endpoints),
        side=group.get(ComponentClass.SIDE),
        cut=group.get(ComponentClass.CUT),
        bound=group.get(ComponentClass.BOUND),
        cut_center=tuple(float(v) for v in center) if center is not None else None,
    )


def fuse_frame(ood, iseg, config):
    """
    Слияние выходов двух моделей одного кадра

    Детекции ниже порога уверенности и детекции класса trunk отбрасываются,
    остальные сопоставляются между задачами по классам и группируются в стволы.
    Результат не зависит от порядка входных детекций.

    Args:
        ood: Детекции OOD
        iseg: Детекции ISEG
        config: FusionConfig

    Returns:
        list: UnifiedTrunk, упорядоченные по центру огибающей
    """
    kept = {SourceTask.OOD: [], SourceTask.ISEG: []}
    for source, detections in ((SourceTask.OOD, ood), (SourceTask.ISEG, iseg)):
        for detection in detections:
            if detection.confidence < config.confidence_threshold:
                continue
            if detection.component == ComponentClass.TRUNK:
                logger.warning('Детекция класса trunk пропущена при слиянии (%s)', source.value)
                continue
            kept[source].append(detection)

    instances = []
    for component in ComponentClass.parts():
        ood_part = sorted((d for d in kept[SourceTask.OOD] if d.component == component), key=_order_key)
        iseg_part = sorted((d for d in kept[SourceTask.ISEG] if d.component == component), key=_order_key)
        matched, free_ood, free_iseg = match_tasks(ood_part, iseg_part, component, config)
        instances.extend(matched)
        instances.extend(single_task_instance(d) for d in free_ood + free_iseg)

    trunks = [build_trunk(group) for group in match_components(instances, config)]
    trunks.sort(key=lambda t: (t.envelope.cx, t.envelope.cy, t.envelope.width, t.envelope.height))
    return trunks


def fuse_sequence(frames, config):
    """
    Слияние всех кадров последовательности

    Args:
        frames: DetectionFrame, упорядоченные по времени
        config: FusionConfig

    Returns:
        list: FusedFrame
    """
    fused = []
    for frame in frames:
        trunks = fuse_frame(frame.by_source(SourceTask.OOD), frame.by_source(SourceTask.ISEG), config)
        fused.append(FusedFrame(frame_id=frame.frame_id, timestamp_s=frame.timestamp_s, trunks=tuple(trunks)))
    logger.info('Слияние: %d кадров, %d стволов', len(fused), sum(len(f.trunks) for f in fused))
    return fused
