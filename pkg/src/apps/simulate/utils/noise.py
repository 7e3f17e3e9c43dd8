"""
Filename: noise.py
Path: src/apps/simulate/utils/noise.py
Description: Псевдодетекции из разметки по модели шума
"""
import math

import numpy as np

from apps.geometry.exceptions import GeometryError
from apps.geometry.models import Contour, OrientedBox
from apps.geometry.utils.boxes import canonicalize_obb
from apps.records.models import ComponentClass, Detection, DetectionFrame, SourceTask

from ..models import PerturbedFrame
from .scene import NOISE_STREAM, rng_for

MIN_EXTENT = 0.5
CLUTTER_SIZE_PX = (8.0, 60.0)
CLUTTER_INDEX = 1 << 20


def _class_index(component):
    return list(ComponentClass.values).index(component)


def draw_confidence(rng, mean, sigma):
    if sigma == 0:
        return float(mean)
    return float(min(max(rng.normal(mean, sigma), 0.0), 1.0))


def jitter_box(rng, box, noise):
    """Сдвиг центра, относительное изменение размеров и поворот бокса"""
    dx, dy = rng.normal(0.0, noise.position_jitter_px, size=2) if noise.position_jitter_px else (0.0, 0.0)
    sw, sh = rng.normal(0.0, noise.size_jitter_frac, size=2) if noise.size_jitter_frac else (0.0, 0.0)
    da = rng.normal(0.0, noise.angle_jitter_rad) if noise.angle_jitter_rad else 0.0
    return canonicalize_obb(OrientedBox(
        box.cx + float(dx),
        box.cy + float(dy),
        max(box.width * (1.0 + float(sw)), MIN_EXTENT),
        max(box.height * (1.0 + float(sh)), MIN_EXTENT),
        box.angle + float(da),
    ))


def jitter_contour(rng, contour, noise):
    """Преобразование подобия контура: сдвиг, поворот и масштаб вокруг центра"""
    dx, dy = rng.normal(0.0, noise.position_jitter_px, size=2) if noise.position_jitter_px else (0.0, 0.0)
    scale = 1.0 + float(rng.normal(0.0, noise.size_jitter_frac)) if noise.size_jitter_frac else 1.0
    angle = float(rng.normal(0.0, noise.angle_jitter_rad)) if noise.angle_jitter_rad else 0.0
    if noise.is_exact:
        return contour
    points = contour.as_array()
    center = points.mean(axis=0)
    c, s = math.cos(angle), math.sin(angle)
    rotation = np.array([[c, -s], [s, c]])
    moved = (points - center) @ rotation.T * max(scale, 0.05) + center + np.array([dx, dy])
    return Contour.from_points(moved.tolist())


def clutter(rng, source, image_size, noise):
    """Ложная детекция в случайном месте кадра"""
    width, height = image_size
    length = float(rng.uniform(*CLUTTER_SIZE_PX))
    box = canonicalize_obb(OrientedBox(
        float(rng.uniform(0, width)), float(rng.uniform(0, height)),
        length, length * float(rng.uniform(0.2, 1.0)), float(rng.uniform(0, math.pi)),
    ))
    component = ComponentClass.parts()[int(rng.integers(0, 3))]
    confidence = draw_confidence(rng, noise.confidence_fp_mean, noise.confidence_sigma)
    if source == SourceTask.OOD:
        return Detection(component, confidence, source, obb=box)
    return Detection(component, confidence, source, contour=Contour.from_points(box.corners))


def perturb_detections(frame, noise, seed):
    """
    Псевдодетекции обеих задач для кадра разметки

    Для каждого компонента одно решение о пропуске действует на обе задачи.
    Генератор привязан к (зерно, кадр, ствол, класс), поэтому результат не
    зависит от порядка обхода.

    Args:
        frame: GroundTruthFrame
        noise: NoiseModel
        seed: Зерно

    Returns:
        PerturbedFrame: Детекции OOD и ISEG с таблицами соответствия разметке
    """
    ood, iseg, ood_truth, iseg_truth = [], [], [], []
    for position, instance in enumerate(frame.instances):
        for component, contour in instance.components.items():
            rng = rng_for(seed, NOISE_STREAM, frame.frame_id, position, _class_index(component))
            if rng.random() < noise.dropout_prob:
                continue
            truth = (instance.trunk_id, component)
            box = contour.obb if noise.is_exact else jitter_box(rng, contour.obb, noise)
            ood.append(Detection(
                component, draw_confidence(rng, noise.confidence_tp_mean, noise.confidence_sigma),
                SourceTask.OOD, obb=box,
            ))
            ood_truth.append(truth)
            try:
                shape = jitter_contour(rng, contour, noise)
            except GeometryError:
                shape = contour
            iseg.append(Detection(
                component, draw_confidence(rng, noise.confidence_tp_mean, noise.confidence_sigma),
                SourceTask.ISEG, contour=shape,
            ))
            iseg_truth.append(truth)

    if noise.clutter_rate > 0 and frame.image_size is not None:
        for task_index, source in enumerate((SourceTask.OOD, SourceTask.ISEG)):
            rng = rng_for(seed, NOISE_STREAM, frame.frame_id, CLUTTER_INDEX, task_index)
            for _ in range(int(rng.poisson(noise.clutter_rate))):
                detection = clutter(rng, source, frame.image_size, noise)
                (ood if source == SourceTask.OOD else iseg).append(detection)
                (ood_truth if source == SourceTask.OOD else iseg_truth).append(None)

    return PerturbedFrame(
        ood=tuple(ood), iseg=tuple(iseg), ood_truth=tuple(ood_truth), iseg_truth=tuple(iseg_truth),
    )


def perturb_sequence(frames, noise, seed):
    """
    Файл детекций для последовательности кадров разметки

    Returns:
        list: DetectionFrame
    """
    output = []
    for frame in frames:
        perturbed = perturb_detections(frame, noise, seed)
        output.append(DetectionFrame(
            frame_id=frame.frame_id,
            timestamp_s=frame.timestamp_s,
            detections=perturbed.ood + perturbed.iseg,
        ))
    return output
