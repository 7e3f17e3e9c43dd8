"""
Filename: sequence.py
Path: src/apps/simulate/utils/sequence.py
Description: Последовательности кадров с движущимися стволами
"""
import numpy as np

from apps.annotation.models import PointAnnotationFrame, PointPrimitive
from apps.records.models import Sequence

from ..exceptions import InvalidSpec
from .scene import MOTION_STREAM, build_scene, frame_from_trunks, rng_for


def trunk_offsets(spec, trunks, n_frames, motion):
    """
    Смещения стволов по кадрам

    Скорость каждого ствола выбирается равномерно в диапазоне; при ненулевом
    шуме ускорения скорость меняется от кадра к кадру.

    Returns:
        ndarray: (n_frames, число стволов, 2)
    """
    offsets = np.zeros((n_frames, len(trunks), 2))
    for index, trunk in enumerate(trunks):
        rng = rng_for(spec.seed, MOTION_STREAM, trunk.trunk_id)
        if tuple(motion.velocity_min) == tuple(motion.velocity_max):
            velocity = np.asarray(motion.velocity_min, dtype=float)
        else:
            velocity = rng.uniform(motion.velocity_min, motion.velocity_max)
        position = np.zeros(2)
        for frame_index in range(1, n_frames):
            if motion.acceleration_sigma:
                velocity = velocity + rng.normal(0.0, motion.acceleration_sigma, size=2)
            position = position + velocity
            offsets[frame_index, index] = position
    return offsets


def simulate_sequence(spec, n_frames, motion, frame_rate=30.0):
    """
    Сцена, последовательность кадров разметки и смещения стволов

    Returns:
        tuple: (SimulatedScene, Sequence, смещения)
    """
    if n_frames < 1:
        raise InvalidSpec(f'Число кадров должно быть не меньше 1: {n_frames}')
    if not frame_rate > 0:
        raise InvalidSpec(f'Частота кадров должна быть положительной: {frame_rate}')
    scene = build_scene(spec)
    offsets = trunk_offsets(spec, scene.trunks, n_frames, motion)
    frames = tuple(
        frame_from_trunks(
            scene.trunks, offsets[index].tolist(), spec.image_size, spec.scene,
            frame_id=index, timestamp_s=index / frame_rate,
        )
        for index in range(n_frames)
    )
    return scene, Sequence(frames=frames, frame_rate=frame_rate), offsets


def gen_sequence(spec, n_frames, motion, frame_rate=30.0):
    """
    Последовательность кадров разметки с постоянными номерами стволов

    Стволы, вышедшие за кадр, пропадают из последующих кадров; номера не переиспользуются.

    Args:
        spec: SceneSpec
        n_frames: Число кадров
        motion: MotionRange
        frame_rate: Частота кадров (кадр k имеет метку k / frame_rate)

    Returns:
        Sequence
    """
    return simulate_sequence(spec, n_frames, motion, frame_rate)[1]


def annotation_frames(scene, sequence, offsets):
    """Точечная разметка кадров последовательности (примитивы видимых стволов)"""
    frames = []
    for index, frame in enumerate(sequence.frames):
        visible = {instance.trunk_id for instance in frame.instances}
        primitives = []
        for position, trunk in enumerate(scene.trunks):
            if trunk.trunk_id not in visible:
                continue
            dx, dy = offsets[index][position]
            primitives.extend(
                PointPrimitive(
                    kind=p.kind,
                    points=tuple((x + float(dx), y + float(dy)) for x, y in p.points),
                    trunk_id=p.trunk_id,
                )
                for p in trunk.primitives
            )
        frames.append(PointAnnotationFrame(
            frame_id=frame.frame_id,
            timestamp_s=frame.timestamp_s,
            primitives=tuple(primitives),
            image_size=frame.image_size,
            scene=frame.scene,
        ))
    return frames
