"""
Filename: eval_det.py
Path: src/apps/metrics/management/commands/eval_det.py
Description: Команда eval-det: детекции и объединенные стволы + разметка -> отчет mAP/P/R
"""
import logging

from django.core.management.base import CommandError

from apps.fusion.utils.io import load_fused
from apps.pipeline.utils.commands import PipelineCommand
from apps.records.utils.io import load_detections, load_ground_truth, write_report

from ...utils.detection import evaluate_detections
from ...utils.mot import pair_frames
from ...utils.overlays import write_overlays
from ...utils.stratify import stratify

logger = logging.getLogger(__name__)

STRATIFIED_METRICS = (
    'ood.map50_95', 'iseg.map50_95', 'fused.map50_95', 'fused.precision', 'fused.recall',
)


class Command(PipelineCommand):
    help = 'Оценка детекций по задачам и объединенных стволов'
    config_flags = ('--iou-thresh', '--raster-size', '--threads')

    def add_command_arguments(self, parser):
        parser.add_argument('--gt', required=True, metavar='FILE', help='Файл разметки')
        parser.add_argument('--detections', metavar='FILE', help='Файл детекций OOD и ISEG')
        parser.add_argument('--fused', metavar='FILE', help='Файл объединенных стволов')
        parser.add_argument('--output', required=True, metavar='FILE', help='JSON-файл отчета')
        parser.add_argument('--overlay-dir', metavar='DIR', help='Каталог PNG-наложений по кадрам')

    def run(self, config, **options):
        if not options.get('detections') and not options.get('fused'):
            raise CommandError('Нужен хотя бы один из --detections и --fused', returncode=2)
        options_metrics = config.metrics
        gt_frames = load_ground_truth(options['gt']).frames
        detections = load_detections(options['detections']) if options.get('detections') else None
        fused = load_fused(options['fused']) if options.get('fused') else None

        metrics, undefined, tables = evaluate_detections(gt_frames, detections, fused, options_metrics)

        if gt_frames and all(frame.scene is not None for frame in gt_frames):
            def evaluate(subset):
                ids = {frame.frame_id for frame in subset}
                values, _, _ = evaluate_detections(
                    subset,
                    [f for f in detections if f.frame_id in ids] if detections is not None else None,
                    [f for f in fused if f.frame_id in ids] if fused is not None else None,
                    options_metrics,
                )
                return {name: values[name] for name in STRATIFIED_METRICS if name in values}

            present = {f.frame_id for f in (detections if detections is not None else fused)}
            tables.append(stratify([f for f in gt_frames if f.frame_id in present], evaluate).table())
        else:
            logger.info('Не у всех кадров разметки есть параметры сцены, стратификация пропущена')

        if options.get('overlay_dir'):
            by_id = {f.frame_id: f for f in fused} if fused is not None else {}
            frames = detections if detections is not None else fused
            write_overlays(options['overlay_dir'], [
                (gt.frame_id, gt, by_id[gt.frame_id].trunks if gt.frame_id in by_id else (), None)
                for gt, _ in pair_frames(gt_frames, frames)
            ])

        inputs = [options['gt'], options.get('detections'), options.get('fused')]
        write_report(self.build_report('eval-det', config, inputs, metrics, undefined, tables), options['output'])
