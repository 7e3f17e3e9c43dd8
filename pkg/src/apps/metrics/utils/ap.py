"""
Filename: ap.py
Path: src/apps/metrics/utils/ap.py
Description: Средняя точность в стиле COCO (101 точка, пороги 0.50-0.95) и точность/полнота слияния
"""
import logging
from collections import defaultdict

import numpy as np

from apps.geometry.utils.boxes import obb_iou

from ..models import IOU_THRESHOLDS, ApResult, ApTable

logger = logging.getLogger(__name__)

RECALL_POINTS = np.linspace(0.0, 1.0, 101)


def sort_by_confidence(confidences):
    """Индексы по убыванию уверенности; равные уверенности сохраняют входной порядок"""
    return np.argsort(-np.asarray(confidences, dtype=float), kind='mergesort')


def greedy_match(overlaps, order, threshold):
    """
    Жадное сопоставление предсказаний с эталонами

    Args:
        overlaps: Матрица (предсказания x эталоны)
        order: Порядок обхода предсказаний
        threshold: Минимальное перекрытие

    Returns:
        ndarray: Для каждого предсказания индекс эталона или -1
    """
    n_pred = overlaps.shape[0]
    matched = np.full(n_pred, -1, dtype=int)
    if not overlaps.size:
        return matched
    taken = np.zeros(overlaps.shape[1], dtype=bool)
    for index in order:
        candidates = np.where(taken, -1.0, overlaps[index])
        best = int(np.argmax(candidates))
        if candidates[best] >= threshold:
            matched[index] = best
            taken[best] = True
    return matched


def average_precision(confidences, is_tp, gt_count):
    """
    AP по 101 точке полноты с огибающей точности

    Args:
        confidences: Уверенности предсказаний
        is_tp: Флаги верных срабатываний
        gt_count: Число эталонов (> 0)

    Returns:
        float
    """
    if not len(confidences):
        return 0.0
    order = sort_by_confidence(confidences)
    tp = np.asarray(is_tp, dtype=bool)[order]
    tp_cum = np.cumsum(tp)
    fp_cum = np.cumsum(~tp)
    recall = tp_cum / gt_count
    precision = tp_cum / (tp_cum + fp_cum)
    envelope = np.maximum.accumulate(precision[::-1])[::-1]
    positions = np.searchsorted(recall, RECALL_POINTS, side='left')
    values = np.where(positions < len(envelope), envelope[np.minimum(positions, len(envelope) - 1)], 0.0)
    return float(np.sum(values) / len(RECALL_POINTS))


def _frame_overlaps(preds, gts, overlap):
    return np.array([[overlap(p.shape, g.shape) for g in gts] for p in preds], dtype=float).reshape(len(preds), len(gts))


def class_ap(predictions, targets, overlap):
    """
    AP одного класса для всех порогов IoU

    Returns:
        ApResult
    """
    by_frame_pred, by_frame_gt = defaultdict(list), defaultdict(list)
    for index, prediction in enumerate(predictions):
        by_frame_pred[prediction.frame_id].append(index)
    for target in targets:
        by_frame_gt[target.frame_id].append(target)

    confidences = [p.confidence for p in predictions]
    hits = {threshold: np.zeros(len(predictions), dtype=bool) for threshold in IOU_THRESHOLDS}
    for frame_id, indices in by_frame_pred.items():
        gts = by_frame_gt.get(frame_id, [])
        if not gts:
            continue
        preds = [predictions[i] for i in indices]
        overlaps = _frame_overlaps(preds, gts, overlap)
        order = sort_by_confidence([p.confidence for p in preds])
        for threshold in IOU_THRESHOLDS:
            matched = greedy_match(overlaps, order, threshold)
            hits[threshold][indices] = matched >= 0

    values = [average_precision(confidences, hits[t], len(targets)) for t in IOU_THRESHOLDS]
    return ApResult(
        ap50_95=float(np.mean(values)),
        ap50=values[0],
        gt_count=len(targets),
        pred_count=len(predictions),
    )


def map_50_95(predictions, targets, overlap):
    """
    mAP50-95 по классам

    Классы без эталонов исключаются из среднего и попадают в undefined.

    Args:
        predictions: Список ScoredInstance
        targets: Список TargetInstance
        overlap: Функция перекрытия двух форм

    Returns:
        ApTable
    """
    pred_by_class, gt_by_class = defaultdict(list), defaultdict(list)
    for prediction in predictions:
        pred_by_class[prediction.component].append(prediction)
    for target in targets:
        gt_by_class[target.component].append(target)

    per_class, undefined = {}, []
    for component in sorted(set(pred_by_class) | set(gt_by_class)):
        if not gt_by_class.get(component):
            logger.info('Класс %s: нет эталонов, AP не определена', component)
            undefined.append(component)
            continue
        per_class[component] = class_ap(pred_by_class.get(component, []), gt_by_class[component], overlap)
    return ApTable(per_class=per_class, undefined=tuple(undefined))


def fused_pr(predictions, targets, iou_thresh=0.5):
    """
    Точность и полнота огибающих боксов стволов

    Args:
        predictions: ScoredInstance с формой OrientedBox
        targets: TargetInstance с формой OrientedBox
        iou_thresh: Порог IoU

    Returns:
        tuple: (precision или None, recall или None, список пар (предсказание, эталон))
    """
    by_frame_pred, by_frame_gt = defaultdict(list), defaultdict(list)
    for prediction in predictions:
        by_frame_pred[prediction.frame_id].append(prediction)
    for target in targets:
        by_frame_gt[target.frame_id].append(target)

    tp, pairs = 0, []
    for frame_id, preds in by_frame_pred.items():
        gts = by_frame_gt.get(frame_id, [])
        overlaps = _frame_overlaps(preds, gts, obb_iou)
        matched = greedy_match(overlaps, sort_by_confidence([p.confidence for p in preds]), iou_thresh)
        for index, gt_index in enumerate(matched):
            if gt_index >= 0:
                tp += 1
                pairs.append((preds[index], gts[gt_index]))
    precision = tp / len(predictions) if predictions else None
    recall = tp / len(targets) if targets else None
    return precision, recall, pairs
