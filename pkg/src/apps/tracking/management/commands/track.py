"""
Filename: track.py
Path: src/apps/tracking/management/commands/track.py
Description: Команда track: детекции или объединенные стволы -> треки
"""
import json
import logging
from pathlib import Path

from apps.fusion.utils.io import load_fused
from apps.fusion.utils.pipeline import fuse_sequence
from apps.pipeline.utils.commands import PipelineCommand
from apps.records.exceptions import IoError, ParseError
from apps.records.utils.io import load_detections

from ...utils.io import write_tracks
from ...utils.tracker import track_sequence

logger = logging.getLogger(__name__)


def input_kind(path):
    """Тип входного файла по первой записи: detections или trunks"""
    try:
        with open(path, encoding='utf-8') as handle:
            for number, line in enumerate(handle, start=1):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ParseError(exc.msg, path=path, line=number) from exc
                if isinstance(record, dict) and 'trunks' in record:
                    return 'trunks'
                return 'detections'
    except OSError as exc:
        raise IoError(Path(path), exc.strerror or str(exc)) from exc
    return 'trunks'


class Command(PipelineCommand):
    help = 'Трекинг объединенных стволов; детекции предварительно объединяются'
    config_flags = ('--confidence-thresh', '--new-track-thresh', '--match-thresh', '--tracker', '--frame-step')

    def add_command_arguments(self, parser):
        parser.add_argument('--input', required=True, metavar='FILE', help='Файл детекций или объединенных стволов')
        parser.add_argument('--output', required=True, metavar='FILE', help='Файл треков')

    def run(self, config, **options):
        path = options['input']
        if input_kind(path) == 'detections':
            logger.info('Вход %s содержит детекции, выполняется слияние', path)
            frames = fuse_sequence(load_detections(path), config.fusion)
        else:
            frames = load_fused(path)
        write_tracks(options['output'], track_sequence(frames, config.tracker))
