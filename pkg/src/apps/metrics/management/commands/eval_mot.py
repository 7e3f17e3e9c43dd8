"""
Filename: eval_mot.py
Path: src/apps/metrics/management/commands/eval_mot.py
Description: Команда eval-mot: треки + разметка -> отчет MOTA/IDF1/IDP/IDR/mIoU_c
"""
import logging

from apps.pipeline.utils.commands import PipelineCommand
from apps.records.utils.io import load_ground_truth, write_report
from apps.tracking.utils.io import load_tracks

from ...utils.mot import accumulate, identity_scores, pair_frames, score_frames
from ...utils.overlays import write_overlays
from ...utils.stratify import stratify

logger = logging.getLogger(__name__)

STRATIFIED_METRICS = ('mota', 'idf1', 'miou_c')


class Command(PipelineCommand):
    help = 'Оценка трекинга: CLEAR-MOT и идентификационные метрики'
    config_flags = ('--iou-thresh', '--raster-size', '--threads', '--frame-step')

    def add_command_arguments(self, parser):
        parser.add_argument('--gt', required=True, metavar='FILE', help='Файл разметки последовательности')
        parser.add_argument('--tracks', required=True, metavar='FILE', help='Файл треков')
        parser.add_argument('--output', required=True, metavar='FILE', help='JSON-файл отчета')
        parser.add_argument('--overlay-dir', metavar='DIR', help='Каталог PNG-наложений по кадрам')

    def run(self, config, **options):
        options_metrics = config.metrics
        threshold = options_metrics.iou_thresh
        gt_frames = load_ground_truth(options['gt']).frames
        tracked = load_tracks(options['tracks'])
        frame_step = config.tracker.frame_step
        scores = score_frames(
            gt_frames, tracked, threshold, options_metrics.raster_size, options_metrics.threads, frame_step,
        )

        metrics, undefined = accumulate(scores, threshold).summary()
        identity, identity_undefined = identity_scores(scores, threshold)
        metrics.update(identity)
        undefined += identity_undefined
        logger.info('MOTA=%.4f IDF1=%.4f по %d кадрам', metrics['mota'], metrics['idf1'], len(scores))

        tables = []
        if scores and all(frame.scene is not None for frame in scores):
            def evaluate(subset):
                values, _ = accumulate(subset, threshold).summary()
                values.update(identity_scores(subset, threshold)[0])
                return {name: values[name] for name in STRATIFIED_METRICS}

            tables.append(stratify(scores, evaluate).table())
        else:
            logger.info('Не у всех кадров разметки есть параметры сцены, стратификация пропущена')

        if options.get('overlay_dir'):
            write_overlays(options['overlay_dir'], [
                (gt.frame_id, gt, [t.trunk for t in frame.tracks], [t.track_id for t in frame.tracks])
                for gt, frame in pair_frames(gt_frames, tracked, frame_step)
            ])

        inputs = [options['gt'], options['tracks']]
        write_report(self.build_report('eval-mot', config, inputs, metrics, undefined, tables), options['output'])
