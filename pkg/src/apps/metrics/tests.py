"""
Filename: tests.py
Path: src/apps/metrics/tests.py
Description: Тесты растеризации, IoU_c, AP, CLEAR-MOT, IDF1, стратификации и команд оценки
"""
import math
from collections import Counter
from dataclasses import replace

import numpy as np
from django.core.management import CommandError, call_command
from django.test import SimpleTestCase

from apps.fusion.models import ComponentInstance
from apps.fusion.utils.pipeline import build_trunk
from apps.geometry.models import Contour, OrientedBox
from apps.geometry.utils.boxes import obb_iou
from apps.records.models import ComponentClass, GroundTruthFrame, GroundTruthInstance, Intensity, SceneParameters
from apps.records.tests import TempDirMixin
from apps.records.utils.io import load_report, summary_path, write_ground_truth
from apps.simulate.models import MotionRange, SceneSpec
from apps.simulate.utils.scene import gen_scene
from apps.simulate.utils.sequence import gen_sequence
from apps.tracking.models import TrackedFrame, TrackedTrunk
from apps.tracking.utils.io import write_tracks

from .exceptions import EmptyInstances, FrameMismatch, MissingSceneParameters
from .models import EventType, ScoredInstance, TargetInstance
from .utils.ap import average_precision, fused_pr, map_50_95
from .utils.mot import (
    FrameScores, MotAccumulator, accumulate, identity_scores, pair_frames, score_frame, score_frames,
)
from .utils.raster import Mask, RasterGrid, component_masks, iou_c, iou_c_masks, mask_iou, rasterize
from .utils.stratify import stratify


def square(x0, y0, size):
    return Contour.from_points([(x0, y0), (x0 + size, y0), (x0 + size, y0 + size), (x0, y0 + size)])


def block(rows, cols, size=32):
    array = np.zeros((size, size), dtype=bool)
    array[rows[0]:rows[1], cols[0]:cols[1]] = True
    return Mask(0, 0, array)


def trunk_of(components, confidence=0.9):
    """Объединенный ствол из контуров компонентов"""
    return build_trunk({
        component: ComponentInstance(
            component=component, obb=contour.obb, confidence=confidence, contour=contour, task_matched=True,
        )
        for component, contour in components.items()
    })


def tracked_from_ground_truth(frames):
    """Треки, совпадающие с разметкой: номер трека равен номеру ствола"""
    return [
        TrackedFrame(
            frame_id=frame.frame_id,
            timestamp_s=frame.timestamp_s,
            tracks=tuple(
                TrackedTrunk(track_id=i.trunk_id, trunk=trunk_of(i.components))
                for i in frame.instances if not i.is_live_tree
            ),
        )
        for frame in frames
    ]


def single_gt_scores(frames, pred_ids):
    """Один объект разметки с полным сходством со своим треком в каждом кадре"""
    return [
        FrameScores(frame_id=k, gt_ids=(1,), pred_ids=(pred,), similarity=np.ones((1, 1)))
        for k, pred in zip(range(frames), pred_ids)
    ]


class RasterTest(SimpleTestCase):
    """Растеризация и покомпонентный IoU"""

    def test_identical_single_component(self):
        mask = block((2, 12), (3, 9))
        self.assertEqual(iou_c_masks({ComponentClass.SIDE: mask}, {ComponentClass.SIDE: mask}), 1.0)
        other = block((5, 15), (3, 9))
        self.assertAlmostEqual(
            iou_c_masks({ComponentClass.SIDE: mask}, {ComponentClass.SIDE: other}), mask_iou(mask, other),
        )

    def test_constructed_component_counts(self):
        # Side: 100 и 100 пикселей с пересечением 50; Cut: одинаковые 20 пикселей
        gt = {ComponentClass.SIDE: block((0, 10), (0, 10)), ComponentClass.CUT: block((20, 22), (0, 10))}
        pred = {ComponentClass.SIDE: block((5, 15), (0, 10)), ComponentClass.CUT: block((20, 22), (0, 10))}
        self.assertAlmostEqual(iou_c_masks(gt, pred), 70 / 170, places=12)
        self.assertAlmostEqual(iou_c_masks(gt, pred), 0.4118, places=4)

    def test_missing_label_counts_in_denominator(self):
        side = block((0, 10), (0, 10))
        gt = {ComponentClass.SIDE: side}
        pred = {ComponentClass.SIDE: side, ComponentClass.CUT: block((20, 22), (0, 10))}
        self.assertAlmostEqual(iou_c_masks(gt, pred), 100 / 120, places=12)

    def test_no_labels(self):
        with self.assertRaises(EmptyInstances):
            iou_c_masks({}, {})

    def test_raster_area(self):
        grid = RasterGrid(400, 400)
        circle = Contour.from_points([
            (200 + 150 * math.cos(t), 200 + 150 * math.sin(t)) for t in np.linspace(0, 2 * math.pi, 256, endpoint=False)
        ])
        self.assertLess(abs(rasterize(circle, grid).area - circle.area) / circle.area, 0.015)
        box = OrientedBox(200, 200, 300, 120, 0.4)
        self.assertLess(abs(rasterize(box, grid).area - box.area) / box.area, 0.015)

    def test_clipped_to_grid(self):
        grid = RasterGrid(50, 50)
        mask = rasterize(square(40, 40, 30), grid)
        self.assertEqual(mask.area, 10 * 10)
        self.assertEqual(rasterize(square(100, 100, 10), grid).area, 0)

    def test_grid_without_image_size(self):
        shapes = [square(0, 0, 10), square(990, 490, 10)]
        grid = RasterGrid.for_frame(None, shapes, raster_size=256)
        self.assertEqual((grid.width, grid.height), (256, 256))
        np.testing.assert_allclose(grid.to_pixels([(1000, 500)]), [[255, 127.5]])

    def test_identical_multi_component_instance(self):
        components = {ComponentClass.SIDE: square(10, 10, 40), ComponentClass.CUT: square(50, 10, 8)}
        grid = RasterGrid(100, 100)
        gt = GroundTruthInstance(trunk_id=1, components=components)
        self.assertEqual(iou_c(gt, trunk_of(components), grid), 1.0)

    def test_trunk_only_ground_truth_merges_prediction(self):
        side, cut = square(10, 10, 40), square(50, 10, 10)
        grid = RasterGrid(100, 100)
        merged = Contour.from_points([(10, 10), (60, 10), (60, 20), (50, 20), (50, 50), (10, 50)])
        gt = GroundTruthInstance(trunk_id=1, components={ComponentClass.TRUNK: merged})
        value = iou_c(gt, trunk_of({ComponentClass.SIDE: side, ComponentClass.CUT: cut}), grid)
        # Без объединения классы не совпали бы и IoU_c был бы 0
        self.assertGreater(value, 0.97)
        masks = component_masks({ComponentClass.SIDE: side, ComponentClass.CUT: cut}, grid, merge=True)
        self.assertEqual(list(masks), [ComponentClass.TRUNK])


class AveragePrecisionTest(SimpleTestCase):
    """AP по 101 точке"""

    def box_target(self, frame_id, box, component=ComponentClass.SIDE):
        return TargetInstance(frame_id, component, box)

    def box_prediction(self, frame_id, box, confidence, component=ComponentClass.SIDE):
        return ScoredInstance(frame_id, component, confidence, box)

    def test_exact_detection(self):
        box = OrientedBox(10, 10, 20, 5, 0.1)
        table = map_50_95([self.box_prediction(0, box, 0.9)], [self.box_target(0, box)], obb_iou)
        self.assertEqual(table.map50_95, 1.0)
        self.assertEqual(table.map50, 1.0)

    def test_no_detections(self):
        table = map_50_95([], [self.box_target(0, OrientedBox(10, 10, 20, 5, 0.1))], obb_iou)
        self.assertEqual(table.map50_95, 0.0)

    def test_one_hit_one_false_positive(self):
        first, second = OrientedBox(10, 10, 20, 5, 0), OrientedBox(100, 10, 20, 5, 0)
        predictions = [
            self.box_prediction(0, first, 0.9),
            self.box_prediction(0, OrientedBox(300, 300, 20, 5, 0), 0.8),
        ]
        table = map_50_95(predictions, [self.box_target(0, first), self.box_target(0, second)], obb_iou)
        self.assertAlmostEqual(table.map50_95, 51 / 101, delta=1e-9)

    def test_average_precision_curve(self):
        self.assertAlmostEqual(average_precision([0.9, 0.8], [True, False], 2), 51 / 101, places=12)
        self.assertEqual(average_precision([0.9, 0.8], [True, True], 2), 1.0)
        self.assertEqual(average_precision([], [], 3), 0.0)

    def test_class_without_ground_truth_is_undefined(self):
        box = OrientedBox(10, 10, 20, 5, 0.1)
        table = map_50_95(
            [self.box_prediction(0, box, 0.9), self.box_prediction(0, box, 0.7, ComponentClass.CUT)],
            [self.box_target(0, box)], obb_iou,
        )
        self.assertEqual(list(table.per_class), [ComponentClass.SIDE])
        self.assertEqual(table.undefined, (ComponentClass.CUT,))
        self.assertEqual(table.map50_95, 1.0)

    def test_detections_in_other_frames_are_false_positives(self):
        box = OrientedBox(10, 10, 20, 5, 0.1)
        table = map_50_95([self.box_prediction(1, box, 0.9)], [self.box_target(0, box)], obb_iou)
        self.assertEqual(table.map50_95, 0.0)

    def test_fused_precision_recall(self):
        boxes = [OrientedBox(50 * k, 0, 20, 5, 0) for k in range(4)]
        targets = [self.box_target(0, b, ComponentClass.TRUNK) for b in boxes]
        predictions = [self.box_prediction(0, b, 0.9, ComponentClass.TRUNK) for b in boxes[:2]]
        precision, recall, pairs = fused_pr(predictions, targets, 0.5)
        self.assertEqual((precision, recall), (1.0, 0.5))
        self.assertEqual(len(pairs), 2)
        self.assertEqual(fused_pr([], [], 0.5)[:2], (None, None))


class ClearMotTest(SimpleTestCase):
    """Накопитель CLEAR-MOT"""

    def test_identical(self):
        accumulator = MotAccumulator()
        for frame_id in range(5):
            accumulator.update(frame_id, [1, 2, 3], [1, 2, 3], np.eye(3))
        metrics, undefined = accumulator.summary()
        self.assertEqual(undefined, [])
        self.assertEqual(metrics['mota'], 1.0)
        self.assertEqual(metrics['motp'], 1.0)
        self.assertEqual((metrics['misses'], metrics['false_positives'], metrics['switches']), (0, 0, 0))
        self.assertEqual(metrics['mostly_tracked'], 3)

    def test_empty_predictions(self):
        accumulator = MotAccumulator()
        for frame_id in range(4):
            accumulator.update(frame_id, [1, 2], [], np.zeros((2, 0)))
        metrics, undefined = accumulator.summary()
        self.assertEqual(metrics['mota'], 0.0)
        self.assertEqual(metrics['misses'], 8)
        self.assertIn('motp', undefined)
        self.assertEqual(metrics['mostly_lost'], 2)

    def test_one_miss_one_false_positive(self):
        similarity = np.zeros((10, 10))
        similarity[range(9), range(9)] = 0.9
        accumulator = MotAccumulator()
        accumulator.update(0, list(range(1, 11)), list(range(101, 111)), similarity)
        metrics, _ = accumulator.summary()
        self.assertAlmostEqual(metrics['mota'], 0.8, places=12)
        self.assertEqual((metrics['matches'], metrics['misses'], metrics['false_positives']), (9, 1, 1))
        self.assertAlmostEqual(metrics['motp'], 0.9)

    def test_switch_and_fragmentation(self):
        accumulator = MotAccumulator()
        accumulator.update(0, [1], [7], [[1.0]])
        accumulator.update(1, [1], [], np.zeros((1, 0)))
        accumulator.update(2, [1], [8], [[1.0]])
        metrics, _ = accumulator.summary()
        self.assertEqual(metrics['switches'], 1)
        self.assertEqual(metrics['fragmentations'], 1)
        self.assertAlmostEqual(metrics['mota'], 1 - 2 / 3)

    def test_previous_match_is_kept(self):
        # Трек 8 сходнее, но прошлое соответствие 7 еще выше порога
        accumulator = MotAccumulator()
        accumulator.update(0, [1], [7], [[1.0]])
        accumulator.update(1, [1], [7, 8], [[0.6, 0.95]])
        metrics, _ = accumulator.summary()
        self.assertEqual(metrics['switches'], 0)
        self.assertEqual(metrics['false_positives'], 1)

    def test_merge(self):
        first, second = MotAccumulator(name='a'), MotAccumulator(name='b')
        first.update(0, [1], [1], [[1.0]])
        second.update(0, [1], [], np.zeros((1, 0)))
        metrics, _ = first.merge(second).summary()
        self.assertEqual(metrics['gt_total'], 2)
        self.assertAlmostEqual(metrics['mota'], 0.5)

    def test_distractor_match_is_ignored(self):
        frame = GroundTruthFrame(
            frame_id=0, timestamp_s=0.0, image_size=(100, 100),
            instances=(
                GroundTruthInstance(trunk_id=1, components={ComponentClass.SIDE: square(10, 10, 20)}),
                GroundTruthInstance(trunk_id=0, components={ComponentClass.SIDE: square(60, 60, 20)}),
            ),
        )
        tracked = TrackedFrame(frame_id=0, timestamp_s=0.0, tracks=(
            TrackedTrunk(track_id=5, trunk=trunk_of({ComponentClass.SIDE: square(10, 10, 20)})),
            TrackedTrunk(track_id=6, trunk=trunk_of({ComponentClass.SIDE: square(60, 60, 20)})),
        ))
        scores = score_frame(frame, tracked)
        self.assertEqual(scores.gt_ids, (1,))
        self.assertEqual(scores.ignored, frozenset({1}))
        metrics, _ = accumulate([scores]).summary()
        self.assertEqual((metrics['mota'], metrics['false_positives'], metrics['ignored']), (1.0, 0, 1))

    def test_pair_frames(self):
        gt = [GroundTruthFrame(frame_id=k, timestamp_s=k / 10) for k in range(7)]
        every_third = [TrackedFrame(frame_id=k, timestamp_s=k / 10) for k in (0, 3, 6)]
        self.assertEqual([g.frame_id for g, _ in pair_frames(gt, every_third, frame_step=3)], [0, 3, 6])
        with self.assertRaises(FrameMismatch):
            pair_frames(gt, every_third)
        with self.assertRaises(FrameMismatch):
            pair_frames(gt, [])
        with self.assertRaises(FrameMismatch):
            pair_frames(gt, [TrackedFrame(frame_id=9, timestamp_s=0.9)])

    def test_truncated_predictions(self):
        gt = [GroundTruthFrame(frame_id=k, timestamp_s=k / 10) for k in range(7)]
        truncated = [TrackedFrame(frame_id=k, timestamp_s=k / 10) for k in range(4)]
        with self.assertRaises(FrameMismatch):
            pair_frames(gt, truncated)
        with self.assertRaises(FrameMismatch):
            pair_frames(gt, [TrackedFrame(frame_id=k, timestamp_s=k / 10) for k in (0, 3)], frame_step=3)
        with self.assertRaises(FrameMismatch):
            pair_frames(gt, [TrackedFrame(frame_id=k, timestamp_s=k / 10) for k in (0, 1, 2, 4, 5, 6)])


class IdentityMetricsTest(SimpleTestCase):
    """IDF1, IDP, IDR"""

    def test_perfect(self):
        metrics, undefined = identity_scores(single_gt_scores(10, [1] * 10))
        self.assertEqual((metrics['idf1'], metrics['idp'], metrics['idr']), (1.0, 1.0, 1.0))
        self.assertEqual(undefined, [])

    def test_split_trajectory(self):
        metrics, _ = identity_scores(single_gt_scores(10, [1] * 5 + [2] * 5))
        self.assertEqual((metrics['idtp'], metrics['idfp'], metrics['idfn']), (5, 5, 5))
        self.assertEqual(metrics['idf1'], 0.5)

    def test_no_predictions(self):
        scores = [FrameScores(frame_id=k, gt_ids=(1,), pred_ids=(), similarity=np.zeros((1, 0))) for k in range(3)]
        metrics, undefined = identity_scores(scores)
        self.assertEqual(metrics['idf1'], 0.0)
        self.assertEqual(metrics['idp'], 0.0)
        self.assertIn('idp', undefined)
        self.assertNotIn('idf1', undefined)


class StratifyTest(SimpleTestCase):
    """Метрики по слоям"""

    def frames(self, count, **scene):
        values = {'entropy': Intensity.LOW, 'quantity': Intensity.LOW, 'distance': Intensity.MID,
                  'irregularity': Intensity.HIGH, **scene}
        return [
            GroundTruthFrame(frame_id=k, timestamp_s=k / 10, scene=SceneParameters(**values))
            for k in range(count)
        ]

    def test_partition(self):
        frames = self.frames(3) + self.frames(2, entropy=Intensity.HIGH, snow=True)
        report = stratify(frames, lambda subset: {'frames': float(len(subset))})
        by_key = {(row.parameter, row.level): row for row in report.rows}
        self.assertEqual(len(report.rows), 14)
        self.assertEqual(by_key[('entropy', 'low')].frames, 3)
        self.assertEqual(by_key[('entropy', 'mid')].frames, 0)
        self.assertEqual(by_key[('entropy', 'high')].frames, 2)
        self.assertEqual(by_key[('snow', 'true')].frames, 2)
        for parameter in ('entropy', 'quantity', 'distance', 'irregularity', 'snow'):
            self.assertEqual(sum(r.frames for r in report.rows if r.parameter == parameter), 5)

    def test_empty_stratum_is_undefined(self):
        report = stratify(self.frames(2), lambda subset: {'mota': 1.0})
        table = report.table()
        row = next(r for r in table['rows'] if r[:2] == ['entropy', 'mid'])
        self.assertEqual(row[-1], 'undefined')

    def test_missing_scene(self):
        with self.assertRaises(MissingSceneParameters):
            stratify([GroundTruthFrame(frame_id=0, timestamp_s=0.0)], lambda subset: {})


class MetricInvariantTest(SimpleTestCase):
    """Инварианты метрик на случайных данных"""

    def test_monotonic_confidence_transform(self):
        rng = np.random.default_rng(17)
        targets, predictions = [], []
        for frame_id in range(12):
            for _ in range(int(rng.integers(1, 6))):
                box = OrientedBox(
                    float(rng.uniform(0, 500)), float(rng.uniform(0, 500)),
                    float(rng.uniform(20, 60)), float(rng.uniform(5, 15)), float(rng.uniform(0, math.pi)),
                )
                targets.append(TargetInstance(frame_id, ComponentClass.SIDE, box))
                if rng.random() < 0.8:
                    shifted = replace(box, cx=box.cx + float(rng.normal(0, 2)), cy=box.cy + float(rng.normal(0, 2)))
                    predictions.append(ScoredInstance(frame_id, ComponentClass.SIDE, float(rng.uniform(0.05, 1)), shifted))
            for _ in range(int(rng.integers(0, 3))):
                clutter = OrientedBox(float(rng.uniform(0, 500)), float(rng.uniform(0, 500)), 30.0, 8.0, 0.0)
                predictions.append(ScoredInstance(frame_id, ComponentClass.SIDE, float(rng.uniform(0.05, 1)), clutter))

        base = map_50_95(predictions, targets, obb_iou).map50_95
        self.assertGreater(base, 0.0)
        for transform in (lambda c: c ** 2, lambda c: 0.5 * c + 0.1, math.sqrt):
            scaled = [replace(p, confidence=transform(p.confidence)) for p in predictions]
            self.assertAlmostEqual(map_50_95(scaled, targets, obb_iou).map50_95, base, places=12)

    def test_mota_matches_recount(self):
        rng = np.random.default_rng(23)
        for trial in range(30):
            accumulator = MotAccumulator(sim_thresh=0.5)
            gt_total = pred_total = 0
            for frame_id in range(15):
                gt_ids = sorted(rng.choice(np.arange(1, 8), size=int(rng.integers(0, 7)), replace=False).tolist())
                pred_ids = sorted(rng.choice(np.arange(1, 10), size=int(rng.integers(0, 8)), replace=False).tolist())
                accumulator.update(frame_id, gt_ids, pred_ids, rng.uniform(0.0, 1.0, size=(len(gt_ids), len(pred_ids))))
                gt_total += len(gt_ids)
                pred_total += len(pred_ids)

            matched = [e for e in accumulator.events if e.type in (EventType.MATCH, EventType.SWITCH)]
            last, switches = {}, 0
            for event in matched:
                self.assertGreaterEqual(event.similarity, 0.5)
                if event.gt_id in last and last[event.gt_id] != event.pred_id:
                    switches += 1
                last[event.gt_id] = event.pred_id
            per_frame = Counter((e.frame_id, e.gt_id) for e in matched)
            self.assertTrue(all(count == 1 for count in per_frame.values()))

            misses, false_positives = gt_total - len(matched), pred_total - len(matched)
            metrics, _ = accumulator.summary()
            with self.subTest(trial=trial):
                self.assertEqual((metrics['misses'], metrics['false_positives'], metrics['switches']),
                                 (misses, false_positives, switches))
                self.assertAlmostEqual(metrics['mota'], 1.0 - (misses + false_positives + switches) / gt_total, places=12)

    def test_fused_recall_under_dropout(self):
        rng = np.random.default_rng(31)
        targets, predictions = [], []
        for frame_id in range(100):
            for k in range(10):
                box = OrientedBox(60.0 * k + 20.0, 40.0, 40.0, 10.0, 0.0)
                targets.append(TargetInstance(frame_id, ComponentClass.TRUNK, box))
                if rng.random() >= 0.2:
                    shifted = replace(box, cx=box.cx + float(rng.normal(0, 0.5)))
                    predictions.append(ScoredInstance(frame_id, ComponentClass.TRUNK, 0.9, shifted))
        precision, recall, _ = fused_pr(predictions, targets, 0.5)
        self.assertEqual(precision, 1.0)
        # Три стандартных отклонения биномиальной доли при n = 1000
        self.assertAlmostEqual(recall, 0.8, delta=3 * math.sqrt(0.8 * 0.2 / len(targets)))

    def test_dropped_frames_never_improve_metrics(self):
        scene = SceneParameters(
            entropy=Intensity.LOW, quantity=Intensity.LOW, distance=Intensity.MID, irregularity=Intensity.LOW,
        )
        spec = SceneSpec(scene=scene, seed=6, trunk_count=3, image_size=(320, 240))
        sequence = gen_sequence(spec, 10, MotionRange(velocity_min=(1.0, 0.0), velocity_max=(1.0, 0.0)))
        tracked = tracked_from_ground_truth(sequence.frames)
        order = np.random.default_rng(8).permutation(len(tracked)).tolist()
        previous = None
        for dropped in range(len(tracked) + 1):
            gone = set(order[:dropped])
            frames = [replace(frame, tracks=()) if index in gone else frame for index, frame in enumerate(tracked)]
            scores = score_frames(sequence.frames, frames)
            metrics, _ = accumulate(scores).summary()
            identity, _ = identity_scores(scores)
            current = (metrics['mota'], identity['idf1'], metrics['matches'])
            if previous is not None:
                for before, after in zip(previous, current):
                    self.assertLessEqual(after, before)
            previous = current
        self.assertEqual(previous, (0.0, 0.0, 0))

    def test_high_quantity_stratum(self):
        frames = []
        for seed, (quantity, distance, count) in enumerate((
            (Intensity.LOW, Intensity.MID, 4),
            (Intensity.MID, Intensity.HIGH, 12),
            (Intensity.HIGH, Intensity.HIGH, 30),
            (Intensity.HIGH, Intensity.HIGH, 32),
        )):
            scene = SceneParameters(entropy=Intensity.MID, quantity=quantity, distance=distance, irregularity=Intensity.LOW)
            frames.append(replace(gen_scene(SceneSpec(scene=scene, seed=seed, trunk_count=count)), frame_id=seed))
        report = stratify(frames, lambda subset: {'min_trunks': min(f.trunk_count for f in subset)})
        by_key = {(r.parameter, r.level): r for r in report.rows}
        high = by_key[('quantity', 'high')]
        self.assertEqual(high.frames, 2)
        self.assertGreaterEqual(high.metrics['min_trunks'], 30)
        self.assertLess(by_key[('quantity', 'mid')].metrics['min_trunks'], 30)


class EvalMotCommandTest(TempDirMixin, SimpleTestCase):
    """Команда eval-mot"""

    def test_identical_tracks(self):
        scene = SceneParameters(
            entropy=Intensity.LOW, quantity=Intensity.LOW, distance=Intensity.MID, irregularity=Intensity.LOW,
        )
        spec = SceneSpec(scene=scene, seed=2, trunk_count=4, image_size=(320, 240))
        sequence = gen_sequence(spec, 5, MotionRange(velocity_min=(1.0, 0.0), velocity_max=(1.0, 0.0)))
        gt_path, tracks_path = self.tmp / 'gt.jsonl', self.tmp / 'tracks.jsonl'
        write_ground_truth(gt_path, sequence.frames)
        write_tracks(tracks_path, tracked_from_ground_truth(sequence.frames))
        output = self.tmp / 'report.json'
        overlays = self.tmp / 'overlays'
        call_command(
            'eval_mot', '--gt', str(gt_path), '--tracks', str(tracks_path), '--output', str(output),
            '--overlay-dir', str(overlays),
        )
        report = load_report(output)
        self.assertEqual(report['kind'], 'eval-mot')
        self.assertEqual(report['metrics']['mota'], 1.0)
        self.assertEqual(report['metrics']['idf1'], 1.0)
        self.assertAlmostEqual(report['metrics']['miou_c'], 1.0)
        self.assertEqual(sorted(report['inputs']), ['gt.jsonl', 'tracks.jsonl'])
        self.assertEqual(report['tables'][0]['columns'][4:], ['idf1', 'miou_c', 'mota'])
        self.assertTrue(summary_path(output).is_file())
        self.assertEqual(len(list(overlays.glob('frame_*.png'))), 5)

    def write_sequence(self, n_frames):
        scene = SceneParameters(
            entropy=Intensity.LOW, quantity=Intensity.LOW, distance=Intensity.MID, irregularity=Intensity.LOW,
        )
        spec = SceneSpec(scene=scene, seed=4, trunk_count=2, image_size=(320, 240))
        sequence = gen_sequence(spec, n_frames, MotionRange())
        gt_path = self.tmp / 'gt.jsonl'
        write_ground_truth(gt_path, sequence.frames)
        return gt_path, tracked_from_ground_truth(sequence.frames)

    def test_frame_step_subsample(self):
        gt_path, tracked = self.write_sequence(7)
        tracks_path = self.tmp / 'tracks.jsonl'
        write_tracks(tracks_path, tracked[::3])
        output = self.tmp / 'report.json'
        call_command(
            'eval_mot', '--gt', str(gt_path), '--tracks', str(tracks_path), '--output', str(output),
            '--frame-step', '3',
        )
        metrics = load_report(output)['metrics']
        self.assertEqual(metrics['mota'], 1.0)
        self.assertEqual(metrics['gt_total'], 6)

    def test_truncated_tracks_file(self):
        gt_path, tracked = self.write_sequence(7)
        tracks_path = self.tmp / 'tracks.jsonl'
        write_tracks(tracks_path, tracked[:4])
        with self.assertRaises(CommandError):
            call_command(
                'eval_mot', '--gt', str(gt_path), '--tracks', str(tracks_path), '--output', str(self.tmp / 'r.json'),
            )
        self.assertFalse((self.tmp / 'r.json').exists())
