"""
Filename: io.py
Path: src/apps/tracking/utils/io.py
Description: Чтение и запись файлов трекинга
"""
from apps.records.utils.io import order_frames, read_records, write_records

from ..serializers import TrackedFrameSerializer


def load_tracks(path):
    return order_frames(read_records(path, TrackedFrameSerializer), path)


def write_tracks(path, frames):
    return write_records(path, frames, TrackedFrameSerializer)
