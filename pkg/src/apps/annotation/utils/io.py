"""
Filename: io.py
Path: src/apps/annotation/utils/io.py
Description: Чтение точечной разметки и запись OBB-целей
"""
from apps.records.utils.io import order_frames, read_records, write_records

from ..serializers import ObbTargetFrameSerializer, PointAnnotationFrameSerializer


def load_point_annotations(path):
    """
    Загрузка файла точечной разметки

    Returns:
        list: PointAnnotationFrame, упорядоченные по времени
    """
    return order_frames(read_records(path, PointAnnotationFrameSerializer), path)


def write_point_annotations(path, frames):
    return write_records(path, frames, PointAnnotationFrameSerializer)


def write_obb_targets(path, frames):
    """Запись OBB-целей: элементы - (frame_id, timestamp_s, цели)"""
    return write_records(path, frames, ObbTargetFrameSerializer)
