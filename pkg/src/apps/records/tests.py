"""
Filename: tests.py
Path: src/apps/records/tests.py
Description: Тесты форматов детекций, разметки и отчетов
"""
import json
import math
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from apps.geometry.models import Contour, OrientedBox
from apps.geometry.utils.boxes import canonicalize_obb

from .exceptions import IoError, ParseError, SchemaError
from .models import (
    ComponentClass, Detection, DetectionFrame, GroundTruthFrame, GroundTruthInstance,
    Intensity, SceneParameters, SourceTask,
)
from .utils.io import (
    load_detections, load_ground_truth, load_report, summary_path, write_detections,
    write_ground_truth, write_report,
)


def random_contour(rng, cx, cy):
    # Звездный контур: соседние углы отличаются меньше чем на pi
    count = int(rng.integers(5, 12))
    angles = (np.arange(count) + rng.uniform(0.0, 0.8, size=count)) * (2 * np.pi / count)
    radii = rng.uniform(5, 20, size=angles.size)
    return Contour.from_points(np.column_stack((cx + radii * np.cos(angles), cy + radii * np.sin(angles))).tolist())


def random_detection_frames(rng, count):
    frames = []
    for index in range(count):
        detections = []
        for _ in range(int(rng.integers(0, 6))):
            source = SourceTask.OOD if rng.random() < 0.5 else SourceTask.ISEG
            component = ComponentClass.parts()[int(rng.integers(0, 3))]
            cx, cy = rng.uniform(0, 500, size=2)
            if source == SourceTask.OOD:
                box = canonicalize_obb(OrientedBox(cx, cy, rng.uniform(1, 50), rng.uniform(1, 50), rng.uniform(0, 7)))
                detections.append(Detection(component, float(rng.uniform()), source, obb=box))
            else:
                detections.append(Detection(component, float(rng.uniform()), source, contour=random_contour(rng, cx, cy)))
        frames.append(DetectionFrame(frame_id=index, timestamp_s=index / 30, detections=tuple(detections)))
    return frames


def random_ground_truth(rng, count):
    frames = []
    for index in range(count):
        instances = []
        for trunk_id in range(int(rng.integers(0, 5))):
            classes = [c for c in ComponentClass.parts() if rng.random() < 0.7] or [ComponentClass.SIDE]
            components = {c: random_contour(rng, *rng.uniform(0, 500, size=2)) for c in classes}
            instances.append(GroundTruthInstance(trunk_id=trunk_id, components=components))
        scene = SceneParameters(
            entropy=Intensity.LOW, quantity=Intensity.LOW, distance=Intensity.MID,
            irregularity=Intensity.HIGH, snow=bool(rng.random() < 0.5),
        )
        frames.append(GroundTruthFrame(
            frame_id=index, timestamp_s=index * 0.5, instances=tuple(instances),
            scene=scene, image_size=(640, 480),
        ))
    return frames


class TempDirMixin:
    def setUp(self):
        super().setUp()
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()
        super().tearDown()

    def write_lines(self, name, records):
        path = self.tmp / name
        path.write_text(''.join(json.dumps(r) + '\n' for r in records), encoding='utf-8')
        return path


class DetectionsFormatTest(TempDirMixin, SimpleTestCase):
    """Файл детекций"""

    def frame(self, frame_id, timestamp, detections):
        return {'frame_id': frame_id, 'timestamp_s': timestamp, 'detections': detections}

    def test_valid_two_frame_file(self):
        path = self.write_lines('dets.jsonl', [
            self.frame(1, 0.1, [{'class': 'cut', 'confidence': 0.8, 'contour': [[0, 0], [4, 0], [4, 4], [0, 4]], 'source': 'iseg'}]),
            self.frame(0, 0.0, [{'class': 'side', 'confidence': 0.9, 'obb': [10, 10, 2, 8, 0], 'source': 'ood'}]),
        ])
        frames = load_detections(path)
        self.assertEqual([f.frame_id for f in frames], [0, 1])
        side = frames[0].detections[0]
        self.assertEqual(side.component, ComponentClass.SIDE)
        # Бокс приводится к канонической форме
        self.assertAlmostEqual(side.obb.width, 8)
        self.assertAlmostEqual(side.obb.angle, math.pi / 2)
        self.assertEqual(frames[1].detections[0].source, SourceTask.ISEG)

    def test_confidence_out_of_range(self):
        path = self.write_lines('dets.jsonl', [
            self.frame(0, 0.0, [{'class': 'side', 'confidence': 1.7, 'obb': [0, 0, 2, 1, 0], 'source': 'ood'}]),
        ])
        with self.assertRaises(SchemaError) as ctx:
            load_detections(path)
        self.assertEqual(ctx.exception.field, 'detections[0].confidence')
        self.assertEqual(ctx.exception.line, 1)
        self.assertIn('confidence', str(ctx.exception))

    def test_unknown_class(self):
        path = self.write_lines('dets.jsonl', [
            self.frame(0, 0.0, [{'class': 'branch', 'confidence': 0.5, 'obb': [0, 0, 2, 1, 0], 'source': 'ood'}]),
        ])
        with self.assertRaises(SchemaError) as ctx:
            load_detections(path)
        self.assertEqual(ctx.exception.field, 'detections[0].class')

    def test_missing_geometry(self):
        path = self.write_lines('dets.jsonl', [
            self.frame(0, 0.0, [{'class': 'side', 'confidence': 0.5, 'source': 'ood'}]),
        ])
        with self.assertRaises(SchemaError) as ctx:
            load_detections(path)
        self.assertEqual(ctx.exception.field, 'detections[0].obb')

    def test_iseg_requires_contour(self):
        path = self.write_lines('dets.jsonl', [
            self.frame(0, 0.0, [{'class': 'cut', 'confidence': 0.5, 'obb': [0, 0, 2, 1, 0], 'source': 'iseg'}]),
        ])
        with self.assertRaises(SchemaError) as ctx:
            load_detections(path)
        self.assertEqual(ctx.exception.field, 'detections[0].contour')

    def test_malformed_line(self):
        path = self.tmp / 'dets.jsonl'
        path.write_text('{"frame_id": 0, "timestamp_s": 0, "detections": []}\n{"frame_id": 1,\n', encoding='utf-8')
        with self.assertRaises(ParseError) as ctx:
            load_detections(path)
        self.assertEqual(ctx.exception.line, 2)

    def test_non_increasing_timestamps(self):
        path = self.write_lines('dets.jsonl', [self.frame(0, 1.0, []), self.frame(1, 1.0, [])])
        with self.assertRaises(SchemaError):
            load_detections(path)

    def test_missing_file(self):
        with self.assertRaises(IoError) as ctx:
            load_detections(self.tmp / 'absent.jsonl')
        self.assertIn('absent.jsonl', str(ctx.exception))

    def test_round_trip(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            frames = random_detection_frames(rng, 4)
            path = write_detections(self.tmp / 'dets.jsonl', frames)
            self.assertEqual(load_detections(path), frames)


class GroundTruthFormatTest(TempDirMixin, SimpleTestCase):
    """Файл разметки"""

    square = [[0, 0], [10, 0], [10, 10], [0, 10]]

    def record(self, instances, scene=None):
        record = {'frame_id': 0, 'timestamp_s': 0.0, 'instances': instances}
        if scene:
            record['scene'] = scene
        return record

    def test_live_tree_accepted(self):
        path = self.write_lines('gt.jsonl', [self.record([
            {'trunk_id': 0, 'components': {'side': self.square}},
            {'trunk_id': 0, 'components': {'side': [[20, 0], [30, 0], [30, 10]]}},
        ])])
        sequence = load_ground_truth(path)
        self.assertEqual(len(sequence), 1)
        self.assertTrue(sequence.frames[0].instances[0].is_live_tree)
        self.assertEqual(sequence.frames[0].trunk_count, 0)

    def test_duplicate_trunk_and_class(self):
        path = self.write_lines('gt.jsonl', [self.record([
            {'trunk_id': 3, 'components': {'cut': self.square}},
            {'trunk_id': 3, 'components': {'cut': self.square}},
        ])])
        with self.assertRaises(SchemaError) as ctx:
            load_ground_truth(path)
        self.assertEqual(ctx.exception.field, 'instances')

    def test_empty_components(self):
        path = self.write_lines('gt.jsonl', [self.record([{'trunk_id': 1, 'components': {}}])])
        with self.assertRaises(SchemaError):
            load_ground_truth(path)

    def test_self_intersecting_mask(self):
        path = self.write_lines('gt.jsonl', [self.record([
            {'trunk_id': 1, 'components': {'side': [[0, 0], [2, 2], [2, 0], [0, 2], [-1, 1]]}},
        ])])
        with self.assertRaises(SchemaError) as ctx:
            load_ground_truth(path)
        self.assertEqual(ctx.exception.field, 'instances[0].components.side')

    def test_quantity_consistency(self):
        scene = {'entropy': 'low', 'quantity': 'mid', 'distance': 'low', 'irregularity': 'low'}
        path = self.write_lines('gt.jsonl', [self.record([{'trunk_id': 1, 'components': {'side': self.square}}], scene)])
        self.assertFalse(load_ground_truth(path).frames[0].scene.snow)
        with self.assertRaises(SchemaError):
            load_ground_truth(path, check_quantity=True)

    def test_round_trip(self):
        rng = np.random.default_rng(12)
        for _ in range(10):
            frames = random_ground_truth(rng, 3)
            path = write_ground_truth(self.tmp / 'gt.jsonl', frames)
            self.assertEqual(list(load_ground_truth(path).frames), frames)


class ReportFormatTest(TempDirMixin, SimpleTestCase):
    """Отчеты"""

    def report(self):
        return {
            'kind': 'eval-det',
            'config': {'CONFIDENCE_THRESH': 0.4},
            'inputs': {'gt.jsonl': 'abc'},
            'metrics': {'precision': 0.8432, 'recall': 0.729, 'tp': 7},
            'undefined': [],
            'tables': [{'title': 'AP', 'columns': ['class', 'ap'], 'rows': [['side', 0.5], ['cut', 0.25]]}],
        }

    def test_empty_evaluation(self):
        path, summary = write_report({'kind': 'eval-mot', 'metrics': {'mota': 0.0, 'misses': 0}}, self.tmp / 'r.json')
        document = load_report(path)
        self.assertEqual(document['metrics'], {'mota': 0.0, 'misses': 0})
        self.assertTrue(summary.exists())

    def test_round_trip_reproduces_numbers(self):
        path, _ = write_report(self.report(), self.tmp / 'r.json')
        document = load_report(path)
        self.assertEqual(document['metrics'], self.report()['metrics'])
        self.assertEqual(document['tables'], self.report()['tables'])

    def test_deterministic_bytes(self):
        first, _ = write_report(self.report(), self.tmp / 'a.json')
        second, _ = write_report(self.report(), self.tmp / 'b.json')
        self.assertEqual(first.read_bytes(), second.read_bytes())
        self.assertEqual(summary_path(first).read_bytes(), summary_path(second).read_bytes())

    def test_invalid_report(self):
        path = self.tmp / 'bad.json'
        path.write_text(json.dumps({'kind': 'x'}), encoding='utf-8')
        with self.assertRaises(SchemaError):
            load_report(path)
