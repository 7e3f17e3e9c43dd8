"""
Filename: config.py
Path: src/apps/pipeline/utils/config.py
Description: Итоговая конфигурация команд: settings < файл --config < флаги
"""
import logging
import typing
from dataclasses import dataclass, fields
from pathlib import Path

import environ
from django.conf import settings
from django.core.exceptions import ImproperlyConfigured

from apps.annotation.models import AnnotationConfig
from apps.fusion.models import FusionConfig
from apps.metrics.models import MetricOptions
from apps.simulate.models import NoiseModel, SimulationOptions
from apps.tracking.models import TRACKER_PRESETS, TrackerConfig, TrackerPreset

logger = logging.getLogger(__name__)

SECTIONS = {
    'fusion': FusionConfig,
    'tracker': TrackerConfig,
    'noise': NoiseModel,
    'metrics': MetricOptions,
    'annotation': AnnotationConfig,
    'simulation': SimulationOptions,
}


class ConfigFileEnv(environ.Env):
    """Чтение файла KEY=VALUE без обращения к окружению процесса"""
    ENVIRON = {}


def known_keys():
    """Ключ файла -> тип поля настроек"""
    keys = {}
    for config_class in SECTIONS.values():
        hints = typing.get_type_hints(config_class)
        for key, attr in config_class.keys.items():
            keys[key] = hints[attr]
    return keys


def base_values():
    """Значения из settings.TRUNK_* (включая переменные окружения)"""
    values = {}
    for config_class in SECTIONS.values():
        values.update(getattr(settings, config_class.settings_name))
    return values


def _cast(env, key, kind):
    if kind is bool:
        return env.bool(key)
    if kind is int:
        return env.int(key)
    if kind is float:
        return env.float(key)
    return env.str(key)


def read_config_file(path):
    """
    Значения файла конфигурации

    Args:
        path: Путь к файлу KEY=VALUE

    Returns:
        dict: Ключ -> значение, приведенное к типу поля
    """
    path = Path(path)
    if not path.is_file():
        raise ImproperlyConfigured(f'Файл конфигурации не найден: {path}')
    ConfigFileEnv.ENVIRON = {}
    ConfigFileEnv.read_env(str(path), overwrite=True)
    env = ConfigFileEnv()
    keys = known_keys()
    values = {}
    for key in sorted(env.ENVIRON):
        if key not in keys:
            raise ImproperlyConfigured(f'Неизвестный ключ {key} в файле конфигурации {path}')
        try:
            values[key] = _cast(env, key, keys[key])
        except ValueError as exc:
            raise ImproperlyConfigured(f'Некорректное значение {key} в файле {path}: {exc}') from exc
    logger.debug('Прочитано %d ключей из %s', len(values), path)
    return values


@dataclass(frozen=True)
class CliConfig:
    """Проверенная итоговая конфигурация всех разделов"""
    fusion: FusionConfig
    tracker: TrackerConfig
    noise: NoiseModel
    metrics: MetricOptions
    annotation: AnnotationConfig
    simulation: SimulationOptions

    def to_mapping(self):
        mapping = {}
        for section in fields(self):
            mapping.update(getattr(self, section.name).to_mapping())
        return dict(sorted(mapping.items()))


def load_cli_config(path=None, overrides=None):
    """
    Итоговая конфигурация команды

    Пресет трекера, отличный от заданного в settings, заменяет свои ключи
    до применения файла и флагов, поэтому явные значения всегда выигрывают.

    Args:
        path: Файл --config или None
        overrides: Значения флагов по ключам файла

    Returns:
        CliConfig
    """
    file_values = read_config_file(path) if path else {}
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    values = base_values()
    preset = overrides.get('TRACKER_PRESET', file_values.get('TRACKER_PRESET', values['TRACKER_PRESET']))
    if preset not in TrackerPreset.values:
        raise ImproperlyConfigured(f'Неизвестный пресет трекера: {preset}')
    if preset != values['TRACKER_PRESET']:
        values.update(TRACKER_PRESETS[TrackerPreset(preset)])
    values.update(file_values)
    values.update(overrides)
    return CliConfig(**{name: config_class.from_mapping(values) for name, config_class in SECTIONS.items()})
