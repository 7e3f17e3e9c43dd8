"""
Filename: exceptions.py
Path: src/apps/tracking/exceptions.py
Description: Исключения трекинга
"""


class TrackingError(ValueError):
    """Базовая ошибка трекинга"""


class NonMonotonicTimestamp(TrackingError):
    """Метки времени кадров не возрастают строго"""
