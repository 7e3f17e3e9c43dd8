"""
Filename: settings.py
Path: src/apps/records/utils/settings.py
Description: Связь dataclass-настроек с плоскими словарями settings.TRUNK_*
"""
import enum
from dataclasses import replace

from django.conf import settings


class SettingsMappedConfig:
    """
    Примесь для frozen dataclass с настройками

    settings_name - имя словаря в settings, keys - соответствие
    ключей словаря (они же ключи файла конфигурации) полям dataclass.
    """

    settings_name = None
    keys = {}

    @classmethod
    def from_mapping(cls, values):
        return cls(**{attr: values[key] for key, attr in cls.keys.items() if key in values})

    @classmethod
    def from_settings(cls, **overrides):
        config = cls.from_mapping(getattr(settings, cls.settings_name))
        return replace(config, **overrides) if overrides else config

    def to_mapping(self):
        mapping = {}
        for key, attr in self.keys.items():
            value = getattr(self, attr)
            mapping[key] = value.value if isinstance(value, enum.Enum) else value
        return mapping
