"""
Filename: detection.py
Path: src/apps/metrics/utils/detection.py
Description: Оценка детекций по задачам и объединенных стволов
"""
import logging
from concurrent.futures import ThreadPoolExecutor

from apps.geometry.utils.boxes import envelope_obb, obb_iou
from apps.records.models import ComponentClass, SourceTask

from ..models import ScoredInstance, TargetInstance
from .ap import fused_pr, map_50_95
from .mot import pair_frames
from .raster import RasterGrid, iou_c, mask_iou, rasterize

logger = logging.getLogger(__name__)


def gt_envelope(instance):
    return envelope_obb([contour.obb for contour in instance.components.values()])


def obb_items(pairs):
    """Цели и предсказания OOD: боксы компонентов"""
    targets, predictions = [], []
    for gt, frame in pairs:
        for instance in gt.instances:
            targets.extend(
                TargetInstance(gt.frame_id, component, contour.obb)
                for component, contour in instance.components.items()
            )
        predictions.extend(
            ScoredInstance(frame.frame_id, d.component, d.confidence, d.obb)
            for d in frame.by_source(SourceTask.OOD)
        )
    return targets, predictions


def _mask_frame(pair, raster_size):
    gt, frame = pair
    detections = frame.by_source(SourceTask.ISEG)
    shapes = [c for i in gt.instances for c in i.components.values()] + [d.contour for d in detections]
    grid = RasterGrid.for_frame(gt.image_size, shapes, raster_size)
    targets = [
        TargetInstance(gt.frame_id, component, rasterize(contour, grid))
        for instance in gt.instances
        for component, contour in instance.components.items()
    ]
    predictions = [
        ScoredInstance(frame.frame_id, d.component, d.confidence, rasterize(d.contour, grid))
        for d in detections
    ]
    return targets, predictions


def mask_items(pairs, raster_size=1024, threads=1):
    """Цели и предсказания ISEG: маски на сетке кадра"""
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            results = list(executor.map(lambda pair: _mask_frame(pair, raster_size), pairs))
    else:
        results = [_mask_frame(pair, raster_size) for pair in pairs]
    targets = [t for frame_targets, _ in results for t in frame_targets]
    predictions = [p for _, frame_predictions in results for p in frame_predictions]
    return targets, predictions


def trunk_items(pairs):
    """Огибающие стволов разметки и объединенных стволов (класс Trunk)"""
    targets, predictions = [], []
    for gt, frame in pairs:
        targets.extend(
            TargetInstance(gt.frame_id, ComponentClass.TRUNK, gt_envelope(instance), item=(gt, instance))
            for instance in gt.instances
        )
        predictions.extend(
            ScoredInstance(frame.frame_id, ComponentClass.TRUNK, trunk.confidence, trunk.envelope, item=trunk)
            for trunk in frame.trunks
        )
    return targets, predictions


def _ap_metrics(prefix, table, metrics, undefined, rows):
    for component, result in table.per_class.items():
        name = f'{prefix}.{ComponentClass(component).value}'
        metrics[f'{name}.map50_95'] = result.ap50_95
        metrics[f'{name}.map50'] = result.ap50
        rows.append([prefix, ComponentClass(component).value, result.gt_count, result.pred_count,
                     result.ap50_95, result.ap50])
    for component in table.undefined:
        undefined.append(f'{prefix}.{ComponentClass(component).value}.map50_95')
    if table.map50_95 is None:
        metrics[f'{prefix}.map50_95'] = 0.0
        metrics[f'{prefix}.map50'] = 0.0
        undefined.extend([f'{prefix}.map50_95', f'{prefix}.map50'])
    else:
        metrics[f'{prefix}.map50_95'] = table.map50_95
        metrics[f'{prefix}.map50'] = table.map50


def mean_iou_c(matches, raster_size=1024):
    """Средний IoU_c по верно сопоставленным парам (ствол, экземпляр разметки)"""
    values = []
    for prediction, target in matches:
        gt_frame, instance = target.item
        trunk = prediction.item
        shapes = [c for c in instance.components.values()]
        shapes += [i.contour if i.contour is not None else i.obb for i in trunk.components.values()]
        grid = RasterGrid.for_frame(gt_frame.image_size, shapes, raster_size)
        values.append(iou_c(instance, trunk, grid))
    return sum(values) / len(values) if values else None


def evaluate_detections(gt_frames, detection_frames=None, fused_frames=None, options=None):
    """
    Метрики детекций

    Args:
        gt_frames: Кадры разметки
        detection_frames: DetectionFrame (OOD и ISEG) или None
        fused_frames: FusedFrame или None
        options: MetricOptions

    Returns:
        tuple: (dict метрик, список неопределенных метрик, список таблиц)
    """
    metrics, undefined, rows = {}, [], []
    if detection_frames is not None:
        pairs = pair_frames(gt_frames, detection_frames)
        targets, predictions = obb_items(pairs)
        _ap_metrics('ood', map_50_95(predictions, targets, obb_iou), metrics, undefined, rows)
        targets, predictions = mask_items(pairs, options.raster_size, options.threads)
        _ap_metrics('iseg', map_50_95(predictions, targets, mask_iou), metrics, undefined, rows)

    if fused_frames is not None:
        pairs = pair_frames(gt_frames, fused_frames)
        targets, predictions = trunk_items(pairs)
        _ap_metrics('fused', map_50_95(predictions, targets, obb_iou), metrics, undefined, rows)
        precision, recall, matches = fused_pr(predictions, targets, options.iou_thresh)
        miou = mean_iou_c(matches, options.raster_size)
        for name, value in (('precision', precision), ('recall', recall), ('miou_c', miou)):
            if value is None:
                undefined.append(f'fused.{name}')
            metrics[f'fused.{name}'] = value if value is not None else 0.0
        logger.info('Слияние: P=%.3f R=%.3f по %d стволам', metrics['fused.precision'],
                    metrics['fused.recall'], len(targets))

    tables = [{
        'title': 'AP по задачам и классам',
        'columns': ['task', 'class', 'gt', 'pred', 'map50_95', 'map50'],
        'rows': rows,
    }] if rows else []
    return metrics, undefined, tables
