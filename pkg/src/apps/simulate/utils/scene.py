"""
Filename: scene.py
Path: src/apps/simulate/utils/scene.py
Description: Генерация синтетических сцен со стволами по параметрам сцены
"""
import logging
import math

import numpy as np
from shapely import affinity
from shapely.geometry import box as shapely_box
from shapely.ops import unary_union

from apps.annotation.models import PointPrimitive
from apps.geometry.utils.polygons import to_contour
from apps.records.models import ComponentClass, GroundTruthFrame, GroundTruthInstance, Intensity, SceneParameters

from ..exceptions import InvalidSpec
from ..models import SimulatedScene, SimulatedTrunk
from .shapes import build_trunk

logger = logging.getLogger(__name__)

# Потоки генератора случайных чисел
SCENE_STREAM = 0
TRUNK_STREAM = 1
NOISE_STREAM = 2
MOTION_STREAM = 3

# Радиус ствола в долях меньшей стороны изображения
RADIUS_RANGE = {
    Intensity.LOW: (0.05, 0.09),
    Intensity.MID: (0.02, 0.04),
    Intensity.HIGH: (0.008, 0.016),
}
QUANTITY_RANGE = {
    Intensity.LOW: (1, 7),
    Intensity.MID: (8, 29),
    Intensity.HIGH: (30, 45),
}
# Разброс ориентаций (градусы): для High ориентации равномерны
ENTROPY_SIGMA_DEG = {Intensity.LOW: 1.5, Intensity.MID: 20.0}
LOW_ENTROPY_LIMIT_DEG = 4.0
BEND_RANGE_DEG = {
    Intensity.LOW: (0.0, 0.0),
    Intensity.MID: (4.0, 10.0),
    Intensity.HIGH: (12.0, 20.0),
}
LENGTH_RATIO = (5.0, 12.0)
CUT_DEPTH_RANGE = (0.3, 0.6)
BOUND_PROBABILITY = 0.5
GAP_PX = 2.0
MIN_RADIUS_PX = 4.0
# Доля площади обрезанного ствола, которая должна остаться в кадре
MIN_VISIBLE_FRACTION = 0.4
MIN_COMPONENT_AREA = 4.0
# Срезы и границы, видимые меньше чем наполовину, не размечаются
MIN_END_VISIBLE_FRACTION = 0.5
END_COMPONENTS = (ComponentClass.CUT, ComponentClass.BOUND)
MAX_ATTEMPTS = 200
MAX_RESTARTS = 12
SHRINK = 0.8


def rng_for(seed, *stream):
    """Генератор Philox для отдельной сущности: (зерно, поток, индексы)"""
    sequence = np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in stream))
    return np.random.Generator(np.random.Philox(sequence))


def sample_orientation(rng, entropy, base):
    if entropy == Intensity.HIGH:
        return float(rng.uniform(0.0, math.pi))
    sigma = math.radians(ENTROPY_SIGMA_DEG[entropy])
    offset = float(rng.normal(0.0, sigma))
    if entropy == Intensity.LOW:
        limit = math.radians(LOW_ENTROPY_LIMIT_DEG)
        offset = min(max(offset, -limit), limit)
    return base + offset


def sample_trunk(rng, scene, image_size, base, scale):
    """Случайные параметры одного ствола"""
    low, high = RADIUS_RANGE[scene.distance]
    radius = max(float(rng.uniform(low, high)) * min(image_size) * scale, MIN_RADIUS_PX)
    bend_low, bend_high = BEND_RANGE_DEG[scene.irregularity]
    bend = math.radians(float(rng.uniform(bend_low, bend_high))) if bend_high > 0 else 0.0
    if bend and rng.random() < 0.5:
        bend = -bend
    direction = sample_orientation(rng, scene.entropy, base)
    if rng.random() < 0.5:
        direction += math.pi
    return {
        'center': (float(rng.uniform(0, image_size[0])), float(rng.uniform(0, image_size[1]))),
        'direction': direction,
        'length': radius * float(rng.uniform(*LENGTH_RATIO)),
        'radius': radius,
        'bend': bend,
        'cut_depth': float(rng.uniform(*CUT_DEPTH_RANGE)),
        'with_bound': bool(rng.random() < BOUND_PROBABILITY),
    }


def _fits(outline, frame_box, allow_truncation):
    if allow_truncation:
        return outline.intersection(frame_box).area >= MIN_VISIBLE_FRACTION * outline.area
    return frame_box.contains(outline)


def place_trunks(spec, count, base):
    """
    Размещение стволов без пересечений методом отбора

    При неудаче все стволы уменьшаются и размещение повторяется.
    """
    scene = spec.scene
    width, height = spec.image_size
    allow_truncation = scene.distance == Intensity.LOW
    frame_box = shapely_box(0.0, 0.0, width, height)
    inner_box = shapely_box(1.0, 1.0, width - 1.0, height - 1.0)

    for restart in range(MAX_RESTARTS):
        scale = SHRINK ** restart
        placed, occupied = [], []
        for index in range(count):
            rng = rng_for(spec.seed, TRUNK_STREAM, restart, index)
            for _ in range(MAX_ATTEMPTS):
                params = sample_trunk(rng, scene, spec.image_size, base, scale)
                shapes, primitives, endpoints = build_trunk(**params)
                outline = unary_union(list(shapes.values()))
                if not _fits(outline, frame_box if allow_truncation else inner_box, allow_truncation):
                    continue
                padded = outline.buffer(GAP_PX)
                if any(padded.intersects(other) for other in occupied):
                    continue
                placed.append((params, shapes, primitives, endpoints))
                occupied.append(outline)
                break
            else:
                break
        if len(placed) == count:
            if restart:
                logger.debug('Сцена seed=%d размещена с масштабом %.3f', spec.seed, scale)
            return placed
    raise InvalidSpec(f'Не удалось разместить {count} стволов на изображении {spec.image_size}')


def build_scene(spec):
    """
    Синтетическая сцена с истинными стволами

    Args:
        spec: SceneSpec

    Returns:
        SimulatedScene: Кадр разметки (frame_id 0) и стволы
    """
    rng = rng_for(spec.seed, SCENE_STREAM)
    count = spec.trunk_count
    if count is None:
        count = int(rng.integers(QUANTITY_RANGE[spec.scene.quantity][0], QUANTITY_RANGE[spec.scene.quantity][1] + 1))
    base = float(rng.uniform(0.0, math.pi))

    trunks = []
    for index, (params, shapes, primitives, endpoints) in enumerate(place_trunks(spec, count, base), start=1):
        trunks.append(SimulatedTrunk(
            trunk_id=index,
            endpoints=endpoints,
            radius=params['radius'],
            shapes=shapes,
            primitives=tuple(
                PointPrimitive(kind=kind, points=tuple(map(tuple, np.asarray(points).tolist())), trunk_id=index)
                for kind, points in primitives
            ),
        ))
    frame = frame_from_trunks(trunks, [(0.0, 0.0)] * len(trunks), spec.image_size, spec.scene)
    return SimulatedScene(frame=frame, trunks=tuple(trunks))


def frame_from_trunks(trunks, offsets, image_size, scene, frame_id=0, timestamp_s=0.0):
    """
    Кадр разметки из смещенных и обрезанных по кадру стволов

    Стволы, от которых в кадре ничего не осталось, пропускаются; уровень
    quantity пересчитывается по числу видимых стволов.
    """
    frame_box = shapely_box(0.0, 0.0, image_size[0], image_size[1])
    instances = []
    for trunk, (dx, dy) in zip(trunks, offsets):
        components = {}
        for component, shape in trunk.shapes.items():
            moved = affinity.translate(shape, dx, dy) if (dx or dy) else shape
            visible = moved.intersection(frame_box)
            if component in END_COMPONENTS and visible.area < MIN_END_VISIBLE_FRACTION * shape.area:
                continue
            contour = to_contour(visible, MIN_COMPONENT_AREA)
            if contour is not None:
                components[component] = contour
        if components:
            instances.append(GroundTruthInstance(trunk_id=trunk.trunk_id, components=components))
    if scene is not None:
        scene = SceneParameters(
            entropy=scene.entropy,
            quantity=Intensity.for_quantity(len(instances)),
            distance=scene.distance,
            irregularity=scene.irregularity,
            snow=scene.snow,
        )
    return GroundTruthFrame(
        frame_id=frame_id,
        timestamp_s=timestamp_s,
        instances=tuple(instances),
        scene=scene,
        image_size=tuple(image_size),
    )


def gen_scene(spec):
    """Кадр разметки синтетической сцены"""
    return build_scene(spec).frame
