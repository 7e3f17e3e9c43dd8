"""
Filename: models.py
Path: src/apps/annotation/models.py
Description: Точечная разметка, выведенные компоненты и варианты экспорта
"""
from dataclasses import dataclass
from typing import Optional

from django.core.exceptions import ImproperlyConfigured
from django.db import models

from apps.records.utils.settings import SettingsMappedConfig

from .exceptions import InvalidPrimitive


class PrimitiveKind(models.TextChoices):
    """Типы точечных примитивов разметки"""
    EDGE = 'edge', 'Боковая кромка'
    SECTION_LINE = 'section_line', 'Линия обратного среза'
    SECTION_AREA = 'section_area', 'Точки области среза'
    AREA_MARKER = 'area_marker', 'Маркер области'


# Минимальное число точек по типам примитивов
MIN_POINTS = {
    PrimitiveKind.EDGE: 2,
    PrimitiveKind.SECTION_LINE: 2,
    PrimitiveKind.SECTION_AREA: 5,
    PrimitiveKind.AREA_MARKER: 1,
}


class ExportVariant(models.TextChoices):
    """Наборы классов при экспорте разметки"""
    THREE_CLASS = 'three_class', 'Side, Cut, Bound'
    TWO_CLASS = 'two_class', 'Side, Cut'
    SINGLE_TRUNK = 'single_trunk', 'Trunk'


@dataclass(frozen=True)
class PointPrimitive:
    """Примитив точечной разметки одного ствола"""
    kind: PrimitiveKind
    points: tuple
    trunk_id: int

    def __post_init__(self):
        kind = PrimitiveKind(self.kind)
        count = len(self.points)
        if kind == PrimitiveKind.AREA_MARKER and count != 1:
            raise InvalidPrimitive(f'Маркер области должен содержать ровно одну точку, получено {count}')
        if count < MIN_POINTS[kind]:
            raise InvalidPrimitive(f'{kind.value}: нужно минимум {MIN_POINTS[kind]} точек, получено {count}')
        if self.trunk_id < 0:
            raise InvalidPrimitive(f'Отрицательный trunk_id: {self.trunk_id}')


@dataclass(frozen=True)
class PointAnnotationFrame:
    """Точечная разметка одного изображения"""
    frame_id: int
    timestamp_s: float
    primitives: tuple = ()
    image_size: Optional[tuple] = None
    scene: Optional[object] = None


@dataclass(frozen=True)
class DerivedComponents:
    """Контуры компонентов по стволам и предупреждения вывода"""
    trunks: tuple = ()
    warnings: tuple = ()


@dataclass(frozen=True)
class AnnotationConfig(SettingsMappedConfig):
    """Настройки вывода компонентов"""
    settings_name = 'TRUNK_ANNOTATION'
    keys = {
        'ELLIPSE_RESIDUAL_FRAC': 'ellipse_residual_frac',
        'MIN_COMPONENT_WIDTH_PX': 'min_component_width_px',
        'SAMPLE_DENSITY': 'sample_density',
    }

    ellipse_residual_frac: float = 0.02
    min_component_width_px: float = 8.0
    sample_density: float = 0.5

    def __post_init__(self):
        if self.ellipse_residual_frac < 0 or self.min_component_width_px < 0:
            raise ImproperlyConfigured('Пороги разметки не могут быть отрицательными')
        if not self.sample_density > 0:
            raise ImproperlyConfigured(f'sample_density должна быть положительной: {self.sample_density}')
