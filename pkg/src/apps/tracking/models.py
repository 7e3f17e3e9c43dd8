"""
Filename: models.py
Path: src/apps/tracking/models.py
Description: Треки, состояние фильтра Калмана и настройки трекера
"""
from dataclasses import dataclass, field, replace

import numpy as np
from django.core.exceptions import ImproperlyConfigured
from django.db import models

from apps.fusion.models import UnifiedTrunk
from apps.records.utils.settings import SettingsMappedConfig


class TrackStatus(models.TextChoices):
    """Статус трека"""
    TENTATIVE = 'tentative', 'Предварительный'
    CONFIRMED = 'confirmed', 'Подтвержденный'
    LOST = 'lost', 'Потерянный'


class TrackerPreset(models.TextChoices):
    """Готовые конфигурации трекера"""
    BYTETRACK = 'bytetrack', 'ByteTrack'
    BOTSORT = 'botsort', 'Bot-SORT без компенсации движения камеры'
    OPTIMIZED = 'optimized', 'Bot-SORT с оптимизированными порогами'


# Значения, которые задает пресет; остальные ключи берутся из settings
TRACKER_PRESETS = {
    TrackerPreset.BYTETRACK: {
        'TRACK_HIGH_THRESH': 0.5,
        'TRACK_LOW_THRESH': 0.1,
        'NEW_TRACK_THRESH': 0.6,
        'MATCH_THRESH': 0.8,
        'TRACK_BUFFER': 30,
        'FUSE_SCORE': False,
    },
    TrackerPreset.BOTSORT: {
        'TRACK_HIGH_THRESH': 0.5,
        'TRACK_LOW_THRESH': 0.1,
        'NEW_TRACK_THRESH': 0.6,
        'MATCH_THRESH': 0.8,
        'TRACK_BUFFER': 30,
        'FUSE_SCORE': True,
    },
    TrackerPreset.OPTIMIZED: {
        'TRACK_HIGH_THRESH': 0.5,
        'TRACK_LOW_THRESH': 0.1,
        'NEW_TRACK_THRESH': 0.05,
        'MATCH_THRESH': 0.9,
        'TRACK_BUFFER': 30,
        'FUSE_SCORE': True,
    },
}


@dataclass(frozen=True)
class TrackerConfig(SettingsMappedConfig):
    """
    Настройки трекера

    Шумы фильтра Калмана заданы долями высоты бокса (для координат и размеров)
    и в радианах (для угла).
    """
    settings_name = 'TRUNK_TRACKER'
    keys = {
        'TRACKER_PRESET': 'preset',
        'TRACK_HIGH_THRESH': 'track_high_thresh',
        'TRACK_LOW_THRESH': 'track_low_thresh',
        'NEW_TRACK_THRESH': 'new_track_thresh',
        'MATCH_THRESH': 'match_thresh',
        'SECOND_MATCH_THRESH': 'second_match_thresh',
        'UNCONFIRMED_MATCH_THRESH': 'unconfirmed_match_thresh',
        'TRACK_BUFFER': 'track_buffer',
        'MIN_HITS': 'min_hits',
        'FUSE_SCORE': 'fuse_score',
        'FRAME_RATE': 'frame_rate',
        'FRAME_STEP': 'frame_step',
        'KF_POSITION_NOISE': 'position_noise',
        'KF_VELOCITY_NOISE': 'velocity_noise',
        'KF_MEASUREMENT_NOISE': 'measurement_noise',
        'KF_ANGLE_NOISE': 'angle_noise',
        'KF_ANGLE_VELOCITY_NOISE': 'angle_velocity_noise',
        'KF_ANGLE_MEASUREMENT_NOISE': 'angle_measurement_noise',
    }

    preset: TrackerPreset = TrackerPreset.BYTETRACK
    track_high_thresh: float = 0.5
    track_low_thresh: float = 0.1
    new_track_thresh: float = 0.6
    match_thresh: float = 0.8
    second_match_thresh: float = 0.5
    unconfirmed_match_thresh: float = 0.7
    track_buffer: int = 30
    min_hits: int = 1
    fuse_score: bool = False
    frame_rate: float = 30.0
    frame_step: int = 1
    position_noise: float = 1.0 / 20
    velocity_noise: float = 1.0 / 160
    measurement_noise: float = 1.0 / 20
    angle_noise: float = 0.02
    angle_velocity_noise: float = 0.005
    angle_measurement_noise: float = 0.02

    def __post_init__(self):
        if self.preset not in TrackerPreset.values:
            raise ImproperlyConfigured(f'Неизвестный пресет трекера: {self.preset}')
        object.__setattr__(self, 'preset', TrackerPreset(self.preset))
        if not 0.0 <= self.track_low_thresh <= self.track_high_thresh <= 1.0:
            raise ImproperlyConfigured(
                f'Требуется 0 <= track_low_thresh <= track_high_thresh <= 1, '
                f'получено {self.track_low_thresh}, {self.track_high_thresh}'
            )
        for name in ('new_track_thresh', 'match_thresh', 'second_match_thresh', 'unconfirmed_match_thresh'):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ImproperlyConfigured(f'{name} должен лежать в [0, 1], получено {value}')
        if self.track_buffer < 0:
            raise ImproperlyConfigured(f'track_buffer не может быть отрицательным: {self.track_buffer}')
        if self.min_hits < 1 or self.frame_step < 1:
            raise ImproperlyConfigured('min_hits и frame_step должны быть не меньше 1')
        if not self.frame_rate > 0:
            raise ImproperlyConfigured(f'frame_rate должна быть положительной: {self.frame_rate}')
        for name in ('position_noise', 'velocity_noise', 'measurement_noise',
                     'angle_noise', 'angle_velocity_noise', 'angle_measurement_noise'):
            if not getattr(self, name) > 0:
                raise ImproperlyConfigured(f'{name} должен быть положительным')

    @classmethod
    def preset_config(cls, name, **overrides):
        """Настройки пресета поверх settings.TRUNK_TRACKER"""
        if name not in TrackerPreset.values:
            raise ImproperlyConfigured(f'Неизвестный пресет трекера: {name}')
        values = {**cls.from_settings().to_mapping(), **TRACKER_PRESETS[TrackerPreset(name)]}
        values['TRACKER_PRESET'] = name
        config = cls.from_mapping(values)
        return replace(config, **overrides) if overrides else config


@dataclass(eq=False)
class KalmanState:
    """
    Состояние фильтра: среднее (cx, cy, w, h, theta и их скорости за кадр)
    и ковариация 10x10
    """
    mean: np.ndarray
    covariance: np.ndarray


@dataclass(eq=False)
class Track:
    """Трек ствола"""
    track_id: int
    state: KalmanState
    last_trunk: UnifiedTrunk
    status: TrackStatus = TrackStatus.CONFIRMED
    age: int = 1
    time_since_update: int = 0
    hits: int = 1
    updated: bool = field(default=True, repr=False)


@dataclass(frozen=True)
class TrackedTrunk:
    """Ствол с номером трека"""
    track_id: int
    trunk: UnifiedTrunk


@dataclass(frozen=True)
class TrackedFrame:
    """Выход трекера для одного кадра"""
    frame_id: int
    timestamp_s: float
    tracks: tuple = ()
