"""
Filename: models.py
Path: src/apps/metrics/models.py
Description: Оценки совпадения, события трекинга, таблицы AP и стратифицированные отчеты
"""
from dataclasses import dataclass, field
from typing import Optional

from django.core.exceptions import ImproperlyConfigured
from django.db import models

from apps.records.utils.settings import SettingsMappedConfig

# Пороги IoU для mAP50-95
IOU_THRESHOLDS = tuple(round(0.5 + 0.05 * i, 2) for i in range(10))
# Доли покрытия траектории для mostly tracked / mostly lost
MOSTLY_TRACKED = 0.8
MOSTLY_LOST = 0.2


class MatchKind(models.TextChoices):
    """Мера совпадения"""
    MASK_IOU = 'mask_iou', 'IoU масок'
    OBB_IOU = 'obb_iou', 'IoU боксов'
    COMPONENT_IOU = 'component_iou', 'Покомпонентный IoU'


class EventType(models.TextChoices):
    """События накопителя MOT"""
    MATCH = 'match', 'Совпадение'
    SWITCH = 'switch', 'Смена номера'
    MISS = 'miss', 'Пропуск'
    FP = 'fp', 'Ложное срабатывание'
    IGNORED = 'ignored', 'Совпадение с отвлекающим объектом'


@dataclass(frozen=True)
class MatchScore:
    """Значение меры совпадения"""
    value: float
    kind: MatchKind

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f'Оценка совпадения вне [0, 1]: {self.value}')


@dataclass(frozen=True)
class MotEvent:
    """Событие кадра: тип, номера разметки и предсказания, сходство"""
    frame_id: int
    type: EventType
    gt_id: Optional[int] = None
    pred_id: Optional[int] = None
    similarity: Optional[float] = None
    sequence: str = ''


@dataclass(frozen=True)
class ScoredInstance:
    """Предсказание для расчета AP: кадр, класс, уверенность и форма"""
    frame_id: int
    component: str
    confidence: float
    shape: object
    item: object = None


@dataclass(frozen=True)
class TargetInstance:
    """Эталонный экземпляр для расчета AP"""
    frame_id: int
    component: str
    shape: object
    item: object = None


@dataclass(frozen=True)
class ApResult:
    """AP класса: среднее по порогам 0.50-0.95 и AP50"""
    ap50_95: float
    ap50: float
    gt_count: int
    pred_count: int


@dataclass(frozen=True)
class ApTable:
    """AP по классам; классы без разметки перечислены в undefined"""
    per_class: dict = field(default_factory=dict)
    undefined: tuple = ()

    @property
    def map50_95(self):
        values = [r.ap50_95 for r in self.per_class.values()]
        return sum(values) / len(values) if values else None

    @property
    def map50(self):
        values = [r.ap50 for r in self.per_class.values()]
        return sum(values) / len(values) if values else None


@dataclass(frozen=True)
class StratumRow:
    """Метрики одного слоя: параметр сцены и его уровень"""
    parameter: str
    level: str
    frames: int
    trunks: int
    metrics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class StratifiedReport:
    """Таблица метрик по слоям параметров сцены"""
    rows: tuple = ()

    def table(self, title='Стратификация по параметрам сцены'):
        names = sorted({name for row in self.rows for name in row.metrics})
        return {
            'title': title,
            'columns': ['parameter', 'level', 'frames', 'trunks', *names],
            'rows': [
                [row.parameter, row.level, row.frames, row.trunks,
                 *[row.metrics.get(name) if row.metrics.get(name) is not None else 'undefined' for name in names]]
                for row in self.rows
            ],
        }


@dataclass(frozen=True)
class MetricOptions(SettingsMappedConfig):
    """Настройки оценки"""
    settings_name = 'TRUNK_METRICS'
    keys = {
        'IOU_THRESH': 'iou_thresh',
        'RASTER_SIZE': 'raster_size',
        'THREADS': 'threads',
    }

    iou_thresh: float = 0.5
    raster_size: int = 1024
    threads: int = 1

    def __post_init__(self):
        if not 0.0 < self.iou_thresh <= 1.0:
            raise ImproperlyConfigured(f'iou_thresh должен лежать в (0, 1], получено {self.iou_thresh}')
        if self.raster_size < 16:
            raise ImproperlyConfigured(f'raster_size слишком мал: {self.raster_size}')
        if self.threads < 1:
            raise ImproperlyConfigured(f'threads должен быть не меньше 1: {self.threads}')
