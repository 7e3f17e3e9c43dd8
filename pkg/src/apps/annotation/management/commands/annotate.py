"""
Filename: annotate.py
Path: src/apps/annotation/management/commands/annotate.py
Description: Команда annotate: точечная разметка -> разметка компонентов и OBB-цели
"""
import logging

from apps.pipeline.utils.commands import PipelineCommand
from apps.records.utils.io import write_ground_truth

from ...models import ExportVariant
from ...utils.derive import derive_components
from ...utils.export import export_ground_truth
from ...utils.io import load_point_annotations, write_obb_targets

logger = logging.getLogger(__name__)


class Command(PipelineCommand):
    help = 'Вывод контуров компонентов из точечной разметки и экспорт разметки'

    def add_command_arguments(self, parser):
        parser.add_argument('--input', required=True, metavar='FILE', help='Файл точечной разметки')
        parser.add_argument('--output', required=True, metavar='FILE', help='Файл разметки компонентов')
        parser.add_argument(
            '--variant', choices=ExportVariant.values, default=ExportVariant.THREE_CLASS.value,
            help='Набор классов экспорта',
        )
        parser.add_argument('--targets', metavar='FILE', help='Файл OBB-целей')

    def run(self, config, **options):
        frames, targets, warnings = [], [], 0
        for frame in load_point_annotations(options['input']):
            derived = derive_components(frame.primitives, config.annotation)
            warnings += len(derived.warnings)
            gt_frame, frame_targets = export_ground_truth(
                derived, options['variant'],
                frame_id=frame.frame_id, timestamp_s=frame.timestamp_s,
                image_size=frame.image_size, scene=frame.scene,
            )
            frames.append(gt_frame)
            targets.append((frame.frame_id, frame.timestamp_s, frame_targets))
        write_ground_truth(options['output'], frames)
        if options.get('targets'):
            write_obb_targets(options['targets'], targets)
        logger.info('Разметка: %d кадров, предупреждений: %d', len(frames), warnings)
