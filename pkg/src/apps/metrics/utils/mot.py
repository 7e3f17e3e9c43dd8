"""
Filename: mot.py
Path: src/apps/metrics/utils/mot.py
Description: Накопитель событий CLEAR-MOT, метрики MOTA/MOTP и идентификационные метрики IDF1/IDP/IDR
"""
import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from apps.fusion.utils.assignment import assign_with_threshold, linear_sum_assignment
from apps.records.models import ComponentClass

from ..exceptions import FrameMismatch
from ..models import MOSTLY_LOST, MOSTLY_TRACKED, EventType, MotEvent
from .raster import RasterGrid, component_masks, iou_c_masks, trunk_shapes

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FrameScores:
    """Сходства IoU_c кадра: номера разметки, номера треков и матрица сходства"""
    frame_id: int
    gt_ids: tuple
    pred_ids: tuple
    similarity: np.ndarray
    ignored: frozenset = frozenset()
    scene: object = None
    trunk_count: int = 0


@dataclass
class Coverage:
    """Покрытие траектории разметки"""
    present: int = 0
    matched: int = 0
    fragments: int = 0
    tracked_last: bool = False
    ever_tracked: bool = False


@dataclass
class MotAccumulator:
    """
    Журнал событий CLEAR-MOT одной или нескольких последовательностей

    Соответствие, установленное в прошлом кадре, сохраняется, пока сходство
    не ниже порога; остальные пары назначаются по максимуму суммарного сходства.
    """
    sim_thresh: float = 0.5
    name: str = ''
    events: list = field(default_factory=list)
    coverage: dict = field(default_factory=dict)
    last_match: dict = field(default_factory=dict, repr=False)

    def _event(self, frame_id, kind, gt_id=None, pred_id=None, similarity=None):
        self.events.append(MotEvent(frame_id, kind, gt_id, pred_id, similarity, self.name))

    def update(self, frame_id, gt_ids, pred_ids, similarity, ignored=frozenset()):
        """
        Учет одного кадра

        Args:
            frame_id: Номер кадра
            gt_ids: Номера объектов разметки
            pred_ids: Номера треков
            similarity: Матрица сходства (разметка x треки)
            ignored: Индексы треков, совпавших с отвлекающими объектами
        """
        gt_ids, pred_ids = list(gt_ids), list(pred_ids)
        similarity = np.asarray(similarity, dtype=float).reshape(len(gt_ids), len(pred_ids))
        free_gt = set(range(len(gt_ids)))
        free_pred = set(range(len(pred_ids))) - set(ignored)
        pairs = []

        for g, gt_id in enumerate(gt_ids):
            previous = self.last_match.get(gt_id)
            if previous is None or previous not in pred_ids:
                continue
            p = pred_ids.index(previous)
            if p in free_pred and similarity[g, p] >= self.sim_thresh:
                pairs.append((g, p))
                free_gt.discard(g)
                free_pred.discard(p)

        rows, cols = sorted(free_gt), sorted(free_pred)
        if rows and cols:
            matched, _, _ = assign_with_threshold(1.0 - similarity[np.ix_(rows, cols)], 1.0 - self.sim_thresh)
            for r, c in matched:
                pairs.append((rows[r], cols[c]))
                free_gt.discard(rows[r])
                free_pred.discard(cols[c])

        matched_gt = set()
        for g, p in sorted(pairs):
            gt_id, pred_id = gt_ids[g], pred_ids[p]
            previous = self.last_match.get(gt_id)
            kind = EventType.SWITCH if previous is not None and previous != pred_id else EventType.MATCH
            self._event(frame_id, kind, gt_id, pred_id, float(similarity[g, p]))
            self.last_match[gt_id] = pred_id
            matched_gt.add(g)
        for g in sorted(free_gt):
            self._event(frame_id, EventType.MISS, gt_id=gt_ids[g])
        for p in sorted(free_pred):
            self._event(frame_id, EventType.FP, pred_id=pred_ids[p])
        for p in sorted(ignored):
            self._event(frame_id, EventType.IGNORED, pred_id=pred_ids[p])

        for g, gt_id in enumerate(gt_ids):
            coverage = self.coverage.setdefault((self.name, gt_id), Coverage())
            coverage.present += 1
            tracked = g in matched_gt
            if tracked:
                coverage.matched += 1
                if coverage.ever_tracked and not coverage.tracked_last:
                    coverage.fragments += 1
                coverage.ever_tracked = True
            coverage.tracked_last = tracked

    def merge(self, other):
        """Объединение накопителей разных последовательностей"""
        merged = MotAccumulator(sim_thresh=self.sim_thresh, name=self.name)
        merged.events = self.events + other.events
        merged.coverage = dict(self.coverage)
        for key, value in other.coverage.items():
            if key in merged.coverage:
                current = merged.coverage[key]
                value = Coverage(
                    present=current.present + value.present,
                    matched=current.matched + value.matched,
                    fragments=current.fragments + value.fragments,
                    tracked_last=value.tracked_last,
                    ever_tracked=current.ever_tracked or value.ever_tracked,
                )
            merged.coverage[key] = value
        return merged

    def counts(self):
        return Counter(event.type for event in self.events)

    def summary(self):
        """
        Метрики CLEAR-MOT по журналу

        Returns:
            tuple: (dict метрик, список неопределенных метрик)
        """
        counts = self.counts()
        matches, switches = counts[EventType.MATCH], counts[EventType.SWITCH]
        misses, false_positives = counts[EventType.MISS], counts[EventType.FP]
        gt_total = matches + switches + misses
        similarities = [e.similarity for e in self.events if e.type in (EventType.MATCH, EventType.SWITCH)]
        ratios = [c.matched / c.present for c in self.coverage.values() if c.present]
        undefined = []
        if gt_total:
            mota = 1.0 - (misses + false_positives + switches) / gt_total
        else:
            mota = 0.0
            undefined.append('mota')
        if similarities:
            motp = float(np.mean(similarities))
        else:
            motp = 0.0
            undefined.extend(['motp', 'miou_c'])
        metrics = {
            'mota': mota,
            'motp': motp,
            'miou_c': motp,
            'gt_total': gt_total,
            'pred_total': matches + switches + false_positives,
            'matches': matches,
            'misses': misses,
            'false_positives': false_positives,
            'switches': switches,
            'fragmentations': sum(c.fragments for c in self.coverage.values()),
            'mostly_tracked': sum(1 for r in ratios if r >= MOSTLY_TRACKED),
            'partly_tracked': sum(1 for r in ratios if MOSTLY_LOST <= r < MOSTLY_TRACKED),
            'mostly_lost': sum(1 for r in ratios if r < MOSTLY_LOST),
            'ignored': counts[EventType.IGNORED],
        }
        return metrics, undefined


def pair_frames(gt_frames, pred_frames, frame_step=1):
    """
    Пары кадров (разметка, предсказание) по frame_id

    Предсказания должны покрывать каждый frame_step-й кадр разметки, начиная
    с первого; пропуск других кадров (например, обрезанный файл) - ошибка,
    как и кадр предсказаний без разметки.
    """
    gt_frames = list(gt_frames)
    position = {frame.frame_id: index for index, frame in enumerate(gt_frames)}
    pred_frames = list(pred_frames)
    if not pred_frames:
        raise FrameMismatch('В предсказаниях нет ни одного кадра')
    unknown = [frame.frame_id for frame in pred_frames if frame.frame_id not in position]
    if unknown:
        raise FrameMismatch(f'Кадры предсказаний отсутствуют в разметке: {unknown[:5]}')
    expected = [gt_frames[index].frame_id for index in range(0, len(gt_frames), frame_step)]
    found = [frame.frame_id for frame in pred_frames]
    if found != expected:
        missing = sorted(set(expected) - set(found))
        raise FrameMismatch(
            f'Предсказания не совпадают с кадрами разметки с шагом {frame_step}: '
            f'ожидалось {len(expected)} кадров, получено {len(found)}, нет кадров {missing[:5]}'
        )
    if frame_step > 1:
        logger.info('Оценивается каждый %d-й кадр разметки: %d из %d', frame_step, len(found), len(gt_frames))
    return [(gt_frames[position[frame.frame_id]], frame) for frame in pred_frames]


def score_frame(gt_frame, pred_frame, sim_thresh=0.5, raster_size=1024):
    """
    Матрица IoU_c кадра

    Объекты разметки с trunk_id 0 не оцениваются; треки, сопоставленные
    с ними, помечаются как игнорируемые.

    Returns:
        FrameScores
    """
    real = [i for i in gt_frame.instances if not i.is_live_tree]
    distractors = [i for i in gt_frame.instances if i.is_live_tree]
    tracks = list(pred_frame.tracks)
    shapes = [s for i in gt_frame.instances for s in i.components.values()]
    shapes += [s for t in tracks for s in trunk_shapes(t.trunk).values()]
    grid = RasterGrid.for_frame(gt_frame.image_size, shapes, raster_size)

    plain = [component_masks(trunk_shapes(t.trunk), grid) for t in tracks]
    merged = {}

    def similarity(instance):
        gt_masks = component_masks(instance.components, grid)
        trunk_only = set(instance.components) == {ComponentClass.TRUNK}
        row = []
        for index, track in enumerate(tracks):
            if trunk_only and index not in merged:
                merged[index] = component_masks(trunk_shapes(track.trunk), grid, merge=True)
            row.append(iou_c_masks(gt_masks, merged[index] if trunk_only else plain[index]))
        return row

    ignored = set()
    if distractors and tracks:
        cost = 1.0 - np.array([similarity(i) for i in distractors]).reshape(len(distractors), len(tracks))
        matched, _, _ = assign_with_threshold(cost, 1.0 - sim_thresh)
        ignored = {c for _, c in matched}

    matrix = np.array([similarity(i) for i in real], dtype=float).reshape(len(real), len(tracks))
    return FrameScores(
        frame_id=gt_frame.frame_id,
        gt_ids=tuple(i.trunk_id for i in real),
        pred_ids=tuple(t.track_id for t in tracks),
        similarity=matrix,
        ignored=frozenset(ignored),
        scene=gt_frame.scene,
        trunk_count=gt_frame.trunk_count,
    )


def score_frames(gt_frames, pred_frames, sim_thresh=0.5, raster_size=1024, threads=1, frame_step=1):
    """Сходства по всем кадрам в порядке предсказаний; кадры считаются параллельно"""
    pairs = pair_frames(gt_frames, pred_frames, frame_step)
    if threads <= 1:
        return [score_frame(gt, pred, sim_thresh, raster_size) for gt, pred in pairs]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(lambda pair: score_frame(pair[0], pair[1], sim_thresh, raster_size), pairs))


def accumulate(scores, sim_thresh=0.5, name=''):
    accumulator = MotAccumulator(sim_thresh=sim_thresh, name=name)
    for frame in scores:
        accumulator.update(frame.frame_id, frame.gt_ids, frame.pred_ids, frame.similarity, frame.ignored)
    return accumulator


def identity_scores(scores, sim_thresh=0.5):
    """
    IDF1, IDP и IDR по глобальному сопоставлению траекторий

    Пара (траектория разметки, трек) получает столько совпадений, сколько
    кадров их сходство не ниже порога; назначение максимизирует сумму совпадений.

    Returns:
        tuple: (dict метрик, список неопределенных метрик)
    """
    gt_length, pred_length, together = Counter(), Counter(), Counter()
    for frame in scores:
        gt_length.update(frame.gt_ids)
        kept = [p for p in range(len(frame.pred_ids)) if p not in frame.ignored]
        pred_length.update(frame.pred_ids[p] for p in kept)
        for g, gt_id in enumerate(frame.gt_ids):
            for p in kept:
                if frame.similarity[g, p] >= sim_thresh:
                    together[(gt_id, frame.pred_ids[p])] += 1

    gt_list, pred_list = sorted(gt_length), sorted(pred_length)
    overlap = np.array([[together[(g, p)] for p in pred_list] for g in gt_list], dtype=float)
    overlap = overlap.reshape(len(gt_list), len(pred_list))
    idtp = int(sum(overlap[r, c] for r, c in linear_sum_assignment(-overlap)))
    idfn = sum(gt_length.values()) - idtp
    idfp = sum(pred_length.values()) - idtp

    undefined = []

    def ratio(name, numerator, denominator):
        if denominator:
            return numerator / denominator
        undefined.append(name)
        return 0.0

    metrics = {
        'idf1': ratio('idf1', 2 * idtp, 2 * idtp + idfp + idfn),
        'idp': ratio('idp', idtp, idtp + idfp),
        'idr': ratio('idr', idtp, idtp + idfn),
        'idtp': idtp,
        'idfp': idfp,
        'idfn': idfn,
    }
    return metrics, undefined


def clear_mot(gt_frames, pred_frames, sim_thresh=0.5, raster_size=1024, threads=1, frame_step=1):
    """
    CLEAR-MOT для последовательности треков

    Returns:
        tuple: (MotAccumulator, dict метрик, список неопределенных метрик)
    """
    scores = score_frames(gt_frames, pred_frames, sim_thresh, raster_size, threads, frame_step)
    accumulator = accumulate(scores, sim_thresh)
    return (accumulator, *accumulator.summary())


def id_metrics(gt_frames, pred_frames, sim_thresh=0.5, raster_size=1024, threads=1, frame_step=1):
    scores = score_frames(gt_frames, pred_frames, sim_thresh, raster_size, threads, frame_step)
    return identity_scores(scores, sim_thresh)
