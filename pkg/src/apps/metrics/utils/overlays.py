"""
Filename: overlays.py
Path: src/apps/metrics/utils/overlays.py
Description: PNG-наложения кадров: разметка, компоненты, огибающие, оси и номера треков
"""
import logging
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw

from apps.records.exceptions import IoError

logger = logging.getLogger(__name__)

GT_COLOR = (40, 200, 40)
ENVELOPE_COLOR = (230, 200, 30)
AXIS_COLOR = (230, 60, 60)
TEXT_COLOR = (255, 255, 255)
COMPONENT_COLORS = {
    'side': (70, 130, 230),
    'cut': (230, 120, 40),
    'bound': (180, 70, 200),
    'trunk': (70, 200, 200),
}
MARGIN = 10


def _outline(draw, points, color, width=1):
    points = [(float(x), float(y)) for x, y in points]
    draw.line(points + points[:1], fill=color, width=width)


def canvas_size(gt_frame, trunks):
    """Размер изображения кадра или охват всех форм"""
    if gt_frame is not None and gt_frame.image_size is not None:
        return tuple(gt_frame.image_size)
    points = [p for trunk in trunks for p in trunk.envelope.corners]
    if gt_frame is not None:
        points += [p for i in gt_frame.instances for c in i.components.values() for p in c.vertices]
    if not points:
        return (64, 64)
    high = np.max(np.asarray(points), axis=0)
    return (max(int(high[0]) + MARGIN, 16), max(int(high[1]) + MARGIN, 16))


def render_frame(gt_frame=None, trunks=(), track_ids=None):
    """
    Изображение кадра с разметкой и предсказаниями

    Args:
        gt_frame: GroundTruthFrame или None
        trunks: UnifiedTrunk кадра
        track_ids: Номера треков в порядке trunks

    Returns:
        PIL.Image.Image
    """
    image = Image.new('RGB', canvas_size(gt_frame, trunks), (0, 0, 0))
    draw = ImageDraw.Draw(image)
    if gt_frame is not None:
        for instance in gt_frame.instances:
            for contour in instance.components.values():
                _outline(draw, contour.vertices, GT_COLOR)
    for index, trunk in enumerate(trunks):
        for component, instance in trunk.components.items():
            shape = instance.contour.vertices if instance.contour is not None else instance.obb.corners
            _outline(draw, shape, COMPONENT_COLORS[component.value], width=2)
        _outline(draw, trunk.envelope.corners, ENVELOPE_COLOR)
        draw.line([tuple(map(float, p)) for p in trunk.endpoints], fill=AXIS_COLOR, width=2)
        if track_ids is not None:
            draw.text((trunk.envelope.cx, trunk.envelope.cy), str(track_ids[index]), fill=TEXT_COLOR)
    return image


def write_overlays(directory, frames):
    """
    Запись PNG по кадрам

    Args:
        directory: Каталог вывода
        frames: Элементы (frame_id, GroundTruthFrame или None, стволы, номера треков или None)

    Returns:
        int: Число записанных изображений
    """
    directory = Path(directory)
    frames = list(frames)
    try:
        directory.mkdir(parents=True, exist_ok=True)
        for frame_id, gt_frame, trunks, track_ids in frames:
            render_frame(gt_frame, trunks, track_ids).save(directory / f'frame_{frame_id:06d}.png')
    except OSError as exc:
        raise IoError(directory, exc.strerror or str(exc)) from exc
    logger.info('Наложения записаны в %s: %d кадров', directory, len(frames))
    return len(frames)
