"""
Filename: io.py
Path: src/apps/fusion/utils/io.py
Description: Чтение и запись файлов объединенных стволов
"""
from apps.records.utils.io import order_frames, read_records, write_records

from ..serializers import FusedFrameSerializer


def load_fused(path):
    return order_frames(read_records(path, FusedFrameSerializer), path)


def write_fused(path, frames):
    return write_records(path, frames, FusedFrameSerializer)
