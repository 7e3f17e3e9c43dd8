"""
Filename: models.py
Path: src/apps/fusion/models.py
Description: Компоненты, объединенные стволы и настройки слияния задач
"""
from dataclasses import dataclass
from typing import Optional

from django.core.exceptions import ImproperlyConfigured
from django.db import models

from apps.geometry.models import Contour, OrientedBox
from apps.records.models import ComponentClass
from apps.records.utils.settings import SettingsMappedConfig


class UnmatchedPolicy(models.TextChoices):
    """Судьба детекций без пары из другой задачи"""
    REQUIRE_BOTH = 'require_both', 'Только подтвержденные обеими задачами'
    KEEP_ANY = 'keep_any', 'Сохранять любые'


class ConfidenceMerge(models.TextChoices):
    """Объединение уверенностей OOD и ISEG"""
    MAX = 'max', 'Максимум'
    MEAN = 'mean', 'Среднее'


@dataclass(frozen=True)
class FusionConfig(SettingsMappedConfig):
    """Настройки слияния"""
    settings_name = 'TRUNK_FUSION'
    keys = {
        'CONFIDENCE_THRESH': 'confidence_threshold',
        'TASK_MATCH_MIN_IOU': 'task_match_min_iou',
        'COMPONENT_MATCH_MIN_AFFINITY': 'component_match_min_affinity',
        'UNMATCHED_POLICY': 'unmatched_policy',
        'CONFIDENCE_MERGE': 'confidence_merge',
    }

    confidence_threshold: float = 0.4
    task_match_min_iou: float = 0.1
    component_match_min_affinity: float = 0.25
    unmatched_policy: UnmatchedPolicy = UnmatchedPolicy.KEEP_ANY
    confidence_merge: ConfidenceMerge = ConfidenceMerge.MAX

    def __post_init__(self):
        for name in ('confidence_threshold', 'task_match_min_iou', 'component_match_min_affinity'):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ImproperlyConfigured(f'{name} должен лежать в [0, 1], получено {value}')
        if self.unmatched_policy not in UnmatchedPolicy.values:
            raise ImproperlyConfigured(f'Неизвестная политика: {self.unmatched_policy}')
        if self.confidence_merge not in ConfidenceMerge.values:
            raise ImproperlyConfigured(f'Неизвестное объединение уверенностей: {self.confidence_merge}')
        object.__setattr__(self, 'unmatched_policy', UnmatchedPolicy(self.unmatched_policy))
        object.__setattr__(self, 'confidence_merge', ConfidenceMerge(self.confidence_merge))


@dataclass(frozen=True)
class ComponentInstance:
    """Компонент ствола: OBB и необязательный контур"""
    component: ComponentClass
    obb: OrientedBox
    confidence: float
    contour: Optional[Contour] = None
    task_matched: bool = False


@dataclass(frozen=True)
class UnifiedTrunk:
    """
    Объединенный ствол: не более одного компонента каждого класса,
    огибающий OBB и ровно два конца средней оси
    """
    envelope: OrientedBox
    endpoints: tuple
    side: Optional[ComponentInstance] = None
    cut: Optional[ComponentInstance] = None
    bound: Optional[ComponentInstance] = None
    cut_center: Optional[tuple] = None

    @property
    def components(self):
        """Присутствующие компоненты в порядке side, cut, bound"""
        return {
            instance.component: instance
            for instance in (self.side, self.cut, self.bound)
            if instance is not None
        }

    @property
    def confidence(self):
        return max(instance.confidence for instance in self.components.values())


@dataclass(frozen=True)
class FusedFrame:
    """Объединенные стволы одного кадра"""
    frame_id: int
    timestamp_s: float
    trunks: tuple = ()
