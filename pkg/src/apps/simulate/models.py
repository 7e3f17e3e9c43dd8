"""
Filename: models.py
Path: src/apps/simulate/models.py
Description: Модель шума, спецификации синтетических сцен и их истинные стволы
"""
from dataclasses import dataclass, field
from typing import Optional

from django.core.exceptions import ImproperlyConfigured

from apps.records.models import SceneParameters
from apps.records.utils.settings import SettingsMappedConfig

from .exceptions import InvalidSpec

MAX_SEED = 2 ** 64


@dataclass(frozen=True)
class NoiseModel(SettingsMappedConfig):
    """
    Шум псевдодетекций

    Сигмы положения (px), относительного размера и угла (рад), вероятность
    пропуска компонента, среднее число ложных детекций на кадр и задачу,
    параметры нормального распределения уверенностей.
    """
    settings_name = 'TRUNK_NOISE'
    keys = {
        'POSITION_JITTER_PX': 'position_jitter_px',
        'SIZE_JITTER_FRAC': 'size_jitter_frac',
        'ANGLE_JITTER_RAD': 'angle_jitter_rad',
        'DROPOUT_PROB': 'dropout_prob',
        'CLUTTER_RATE': 'clutter_rate',
        'CONFIDENCE_TP_MEAN': 'confidence_tp_mean',
        'CONFIDENCE_FP_MEAN': 'confidence_fp_mean',
        'CONFIDENCE_SIGMA': 'confidence_sigma',
    }

    position_jitter_px: float = 0.0
    size_jitter_frac: float = 0.0
    angle_jitter_rad: float = 0.0
    dropout_prob: float = 0.0
    clutter_rate: float = 0.0
    confidence_tp_mean: float = 0.9
    confidence_fp_mean: float = 0.3
    confidence_sigma: float = 0.0

    def __post_init__(self):
        for name in self.keys.values():
            if getattr(self, name) < 0:
                raise ImproperlyConfigured(f'{name} не может быть отрицательным')
        if self.dropout_prob > 1.0:
            raise ImproperlyConfigured(f'dropout_prob должна быть вероятностью: {self.dropout_prob}')
        if self.confidence_tp_mean > 1.0 or self.confidence_fp_mean > 1.0:
            raise ImproperlyConfigured('Средние уверенности должны лежать в [0, 1]')

    @property
    def is_exact(self):
        return self.position_jitter_px == 0 and self.size_jitter_frac == 0 and self.angle_jitter_rad == 0


@dataclass(frozen=True)
class SceneSpec:
    """Параметры сцены, размер изображения (ширина, высота) и зерно генератора"""
    scene: SceneParameters
    image_size: tuple = (1280, 720)
    seed: int = 0
    trunk_count: Optional[int] = None

    def __post_init__(self):
        if not 0 <= self.seed < MAX_SEED:
            raise InvalidSpec(f'Зерно должно быть 64-битным беззнаковым: {self.seed}')
        if len(self.image_size) != 2 or min(self.image_size) < 16:
            raise InvalidSpec(f'Некорректный размер изображения: {self.image_size}')
        if self.trunk_count is not None:
            if self.trunk_count < 1:
                raise InvalidSpec(f'Число стволов должно быть положительным: {self.trunk_count}')
            if not self.scene.quantity_matches(self.trunk_count):
                raise InvalidSpec(
                    f'Число стволов {self.trunk_count} не согласовано с quantity={self.scene.quantity.value}'
                )


@dataclass(frozen=True)
class MotionRange:
    """Диапазон скоростей (px за кадр) по осям и шум ускорения"""
    velocity_min: tuple = (0.0, 0.0)
    velocity_max: tuple = (0.0, 0.0)
    acceleration_sigma: float = 0.0

    def __post_init__(self):
        if any(lo > hi for lo, hi in zip(self.velocity_min, self.velocity_max)):
            raise InvalidSpec(f'Пустой диапазон скоростей: {self.velocity_min} .. {self.velocity_max}')
        if self.acceleration_sigma < 0:
            raise InvalidSpec('Шум ускорения не может быть отрицательным')


@dataclass(frozen=True)
class SimulationOptions(SettingsMappedConfig):
    """Настройки команды simulate"""
    settings_name = 'TRUNK_SIMULATION'
    keys = {
        'SEED': 'seed',
        'IMAGE_WIDTH': 'image_width',
        'IMAGE_HEIGHT': 'image_height',
        'FRAMES': 'frames',
        'VELOCITY_MIN_X': 'velocity_min_x',
        'VELOCITY_MIN_Y': 'velocity_min_y',
        'VELOCITY_MAX_X': 'velocity_max_x',
        'VELOCITY_MAX_Y': 'velocity_max_y',
        'ACCELERATION_SIGMA': 'acceleration_sigma',
    }

    seed: int = 0
    image_width: int = 1280
    image_height: int = 720
    frames: int = 1
    velocity_min_x: float = 0.0
    velocity_min_y: float = 0.0
    velocity_max_x: float = 0.0
    velocity_max_y: float = 0.0
    acceleration_sigma: float = 0.0

    def __post_init__(self):
        if not 0 <= self.seed < MAX_SEED:
            raise ImproperlyConfigured(f'Зерно должно быть 64-битным беззнаковым: {self.seed}')
        if self.frames < 1:
            raise ImproperlyConfigured(f'Число кадров должно быть не меньше 1: {self.frames}')

    @property
    def image_size(self):
        return (self.image_width, self.image_height)

    @property
    def motion(self):
        return MotionRange(
            velocity_min=(self.velocity_min_x, self.velocity_min_y),
            velocity_max=(self.velocity_max_x, self.velocity_max_y),
            acceleration_sigma=self.acceleration_sigma,
        )


@dataclass(frozen=True)
class SimulatedTrunk:
    """
    Истинный ствол сцены

    Формы хранятся без обрезки по кадру (shapely Polygon), примитивы - в
    координатах кадра генерации.
    """
    trunk_id: int
    endpoints: tuple
    radius: float
    shapes: dict = field(default_factory=dict)
    primitives: tuple = ()


@dataclass(frozen=True)
class SimulatedScene:
    """Кадр разметки и истинные стволы, из которых он построен"""
    frame: object
    trunks: tuple = ()


@dataclass(frozen=True)
class PerturbedFrame:
    """
    Псевдодетекции кадра и их соответствие разметке

    Соответствие: (trunk_id, ComponentClass) или None для ложных детекций.
    """
    ood: tuple = ()
    iseg: tuple = ()
    ood_truth: tuple = ()
    iseg_truth: tuple = ()
