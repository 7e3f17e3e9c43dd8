"""
Filename: commands.py
Path: src/apps/pipeline/utils/commands.py
Description: Базовая команда конвейера: флаги конфигурации, обработка ошибок и отчеты
"""
import logging
from pathlib import Path

from django.core.exceptions import ImproperlyConfigured
from django.core.management.base import BaseCommand, CommandError

from apps.records.utils.io import file_digest
from apps.tracking.models import TrackerPreset

from .config import load_cli_config

logger = logging.getLogger(__name__)

# Флаг -> (ключ конфигурации, тип, подсказка)
CONFIG_FLAGS = {
    '--confidence-thresh': ('CONFIDENCE_THRESH', float, 'Порог уверенности детекций (по умолчанию 0.4)'),
    '--new-track-thresh': ('NEW_TRACK_THRESH', float, 'Минимальная уверенность для создания трека'),
    '--match-thresh': ('MATCH_THRESH', float, 'Порог стоимости первой стадии сопоставления'),
    '--iou-thresh': ('IOU_THRESH', float, 'Порог IoU для сопоставления при оценке'),
    '--raster-size': ('RASTER_SIZE', int, 'Разрешение сетки растеризации без размера изображения'),
    '--seed': ('SEED', int, 'Зерно генератора'),
    '--threads': ('THREADS', int, 'Число потоков оценки'),
    '--tracker': ('TRACKER_PRESET', str, 'Пресет трекера'),
    '--frame-step': ('FRAME_STEP', int, 'Брать каждый N-й кадр'),
    '--frames': ('FRAMES', int, 'Число кадров последовательности'),
}


class PipelineCommand(BaseCommand):
    """
    Команда конвейера

    Подклассы задают config_flags и реализуют add_command_arguments и run.
    Доменные ошибки превращаются в CommandError с кодом 1.
    """

    requires_system_checks = []
    config_flags = ()

    def add_arguments(self, parser):
        parser.add_argument('--config', dest='config_file', metavar='FILE', help='Файл KEY=VALUE с настройками')
        for flag in self.config_flags:
            key, kind, help_text = CONFIG_FLAGS[flag]
            extra = {'choices': TrackerPreset.values} if key == 'TRACKER_PRESET' else {}
            parser.add_argument(flag, dest=key.lower(), type=kind, help=help_text, **extra)
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def load_config(self, options):
        overrides = {CONFIG_FLAGS[flag][0]: options.get(CONFIG_FLAGS[flag][0].lower()) for flag in self.config_flags}
        return load_cli_config(options.get('config_file'), overrides)

    def handle(self, *args, **options):
        try:
            config = self.load_config(options)
            self.run(config, **options)
        except (ValueError, OSError, ImproperlyConfigured) as exc:
            logger.debug('Команда %s завершилась ошибкой', self.__class__.__module__, exc_info=True)
            raise CommandError(str(exc), returncode=1) from exc

    def run(self, config, **options):
        raise NotImplementedError

    @staticmethod
    def build_report(kind, config, inputs, metrics, undefined=(), tables=()):
        """
        Словарь отчета с итоговой конфигурацией и SHA-256 входных файлов

        Args:
            kind: Тип отчета (eval-det, eval-mot)
            config: CliConfig
            inputs: Пути входных файлов
            metrics: dict метрик
            undefined: Имена неопределенных метрик
            tables: Таблицы отчета

        Returns:
            dict
        """
        return {
            'kind': kind,
            'config': config.to_mapping(),
            'inputs': {Path(path).name: file_digest(path) for path in inputs if path},
            'metrics': dict(sorted(metrics.items())),
            'undefined': sorted(set(undefined)),
            'tables': list(tables),
        }
