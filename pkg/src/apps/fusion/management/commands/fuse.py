"""
Filename: fuse.py
Path: src/apps/fusion/management/commands/fuse.py
Description: Команда fuse: детекции OOD и ISEG -> объединенные стволы
"""
from apps.pipeline.utils.commands import PipelineCommand
from apps.records.utils.io import load_detections

from ...utils.io import write_fused
from ...utils.pipeline import fuse_sequence


class Command(PipelineCommand):
    help = 'Слияние детекций OOD и ISEG в объединенные стволы'
    config_flags = ('--confidence-thresh',)

    def add_command_arguments(self, parser):
        parser.add_argument('--detections', required=True, metavar='FILE', help='JSON-lines файл детекций')
        parser.add_argument('--output', required=True, metavar='FILE', help='Файл объединенных стволов')

    def run(self, config, **options):
        frames = load_detections(options['detections'])
        write_fused(options['output'], fuse_sequence(frames, config.fusion))
