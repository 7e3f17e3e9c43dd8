"""
Filename: models.py
Path: src/apps/records/models.py
Description: Модель данных детекций, разметки, последовательностей и параметров сцены
"""
from dataclasses import dataclass, field
from typing import Optional

from django.db import models

from apps.geometry.models import Contour, OrientedBox

FORMAT_VERSION = 1

# Минимальное число стволов для уровней Mid и High
QUANTITY_MID_MIN = 8
QUANTITY_HIGH_MIN = 30


class ComponentClass(models.TextChoices):
    """Классы компонентов ствола"""
    SIDE = 'side', 'Боковая поверхность'
    CUT = 'cut', 'Срез'
    BOUND = 'bound', 'Граница'
    TRUNK = 'trunk', 'Ствол'

    @classmethod
    def parts(cls):
        """Классы отдельных компонентов (без объединенного Trunk)"""
        return (cls.SIDE, cls.CUT, cls.BOUND)


class SourceTask(models.TextChoices):
    """Задача модели-источника"""
    OOD = 'ood', 'Ориентированные боксы'
    ISEG = 'iseg', 'Сегментация экземпляров'


class Intensity(models.TextChoices):
    """Интенсивность параметра сцены"""
    LOW = 'low', 'Низкая'
    MID = 'mid', 'Средняя'
    HIGH = 'high', 'Высокая'

    @classmethod
    def for_quantity(cls, count):
        if count >= QUANTITY_HIGH_MIN:
            return cls.HIGH
        if count >= QUANTITY_MID_MIN:
            return cls.MID
        return cls.LOW


SCENE_PARAMETERS = ('entropy', 'quantity', 'distance', 'irregularity')


@dataclass(frozen=True)
class SceneParameters:
    """Параметры сцены: четыре интенсивности и флаг снега"""
    entropy: Intensity
    quantity: Intensity
    distance: Intensity
    irregularity: Intensity
    snow: bool = False

    def quantity_matches(self, count):
        """Согласован ли уровень quantity с числом стволов"""
        return Intensity.for_quantity(count) == self.quantity


@dataclass(frozen=True)
class Detection:
    """Один выход модели: класс, уверенность, OBB и/или контур"""
    component: ComponentClass
    confidence: float
    source: SourceTask
    obb: Optional[OrientedBox] = None
    contour: Optional[Contour] = None

    @property
    def box(self):
        """OBB детекции, для сегментации - описанный бокс контура"""
        return self.obb if self.obb is not None else self.contour.obb


@dataclass(frozen=True)
class DetectionFrame:
    """Детекции одного кадра"""
    frame_id: int
    timestamp_s: float
    detections: tuple = ()

    def by_source(self, source):
        return [d for d in self.detections if d.source == source]


@dataclass(frozen=True)
class GroundTruthInstance:
    """Размеченный экземпляр ствола: маски компонентов по классам"""
    trunk_id: int
    components: dict = field(default_factory=dict)

    @property
    def is_live_tree(self):
        return self.trunk_id == 0


@dataclass(frozen=True)
class GroundTruthFrame:
    """Разметка одного кадра"""
    frame_id: int
    timestamp_s: float
    instances: tuple = ()
    scene: Optional[SceneParameters] = None
    image_size: Optional[tuple] = None

    @property
    def trunk_count(self):
        return len({i.trunk_id for i in self.instances if not i.is_live_tree})


@dataclass(frozen=True)
class Sequence:
    """Упорядоченная по времени последовательность кадров"""
    frames: tuple
    frame_rate: Optional[float] = None

    def __iter__(self):
        return iter(self.frames)

    def __len__(self):
        return len(self.frames)

    @property
    def frame_ids(self):
        return [frame.frame_id for frame in self.frames]
