"""
Filename: tests.py
Path: src/apps/simulate/tests.py
Description: Тесты генератора сцен, псевдодетекций и команды simulate
"""
import math

import numpy as np
from django.core.management import call_command
from django.test import SimpleTestCase

from apps.annotation.models import AnnotationConfig
from apps.annotation.utils.derive import derive_components
from apps.annotation.utils.io import load_point_annotations
from apps.records.models import ComponentClass, Intensity, SceneParameters, SourceTask
from apps.records.tests import TempDirMixin
from apps.records.utils.io import load_detections, load_ground_truth, write_detections, write_ground_truth

from .exceptions import InvalidSpec
from .models import MotionRange, NoiseModel, SceneSpec
from .utils.noise import perturb_detections, perturb_sequence
from .utils.scene import build_scene, gen_scene
from .utils.sequence import gen_sequence


def scene_params(entropy=Intensity.LOW, quantity=Intensity.LOW, distance=Intensity.MID, irregularity=Intensity.LOW):
    return SceneParameters(entropy=entropy, quantity=quantity, distance=distance, irregularity=irregularity)


def half_turn_offset(angle, reference):
    """Разность направлений по модулю pi в [-pi/2, pi/2)"""
    return (angle - reference + math.pi / 2) % math.pi - math.pi / 2


class SceneTest(SimpleTestCase):
    """Генерация сцены"""

    def test_deterministic(self):
        spec = SceneSpec(scene=scene_params(irregularity=Intensity.MID), seed=11)
        self.assertEqual(gen_scene(spec), gen_scene(spec))

    def test_different_seeds_differ(self):
        first = gen_scene(SceneSpec(scene=scene_params(), seed=1, trunk_count=3))
        second = gen_scene(SceneSpec(scene=scene_params(), seed=2, trunk_count=3))
        self.assertNotEqual(first, second)

    def test_quantity_level(self):
        spec = SceneSpec(scene=scene_params(quantity=Intensity.MID, distance=Intensity.HIGH), seed=7)
        frame = gen_scene(spec)
        self.assertGreaterEqual(len(frame.instances), 8)
        self.assertEqual(frame.scene.quantity, Intensity.MID)

    def test_low_entropy_orientation_spread(self):
        scene = build_scene(SceneSpec(scene=scene_params(), seed=5, trunk_count=6))
        angles = [math.atan2(end[1] - start[1], end[0] - start[0]) for start, end in (t.endpoints for t in scene.trunks)]
        offsets = [half_turn_offset(angle, angles[0]) for angle in angles]
        self.assertLess(math.degrees(max(offsets) - min(offsets)), 15.0)

    def test_components_are_disjoint(self):
        scene = build_scene(SceneSpec(scene=scene_params(irregularity=Intensity.MID), seed=3, trunk_count=4))
        for instance in scene.frame.instances:
            side = instance.components[ComponentClass.SIDE].polygon
            for component, contour in instance.components.items():
                if component != ComponentClass.SIDE:
                    self.assertLess(side.intersection(contour.polygon).area, 1e-6)

    def test_invalid_spec(self):
        with self.assertRaises(InvalidSpec):
            SceneSpec(scene=scene_params(), trunk_count=20)
        with self.assertRaises(InvalidSpec):
            SceneSpec(scene=scene_params(), seed=-1)
        with self.assertRaises(InvalidSpec):
            MotionRange(velocity_min=(1.0, 0.0), velocity_max=(0.0, 0.0))
        with self.assertRaises(InvalidSpec):
            gen_sequence(SceneSpec(scene=scene_params(), trunk_count=2), 0, MotionRange())


class NoiseTest(SimpleTestCase):
    """Псевдодетекции"""

    def setUp(self):
        spec = SceneSpec(scene=scene_params(quantity=Intensity.MID, distance=Intensity.HIGH), seed=9, trunk_count=20)
        self.frame = gen_scene(spec)
        self.components = [(i.trunk_id, c, contour) for i in self.frame.instances for c, contour in i.components.items()]

    def test_zero_noise_reproduces_ground_truth(self):
        perturbed = perturb_detections(self.frame, NoiseModel(), seed=0)
        self.assertEqual(len(perturbed.ood), len(self.components))
        truth = {(trunk_id, component): contour for trunk_id, component, contour in self.components}
        for detection, key in zip(perturbed.ood, perturbed.ood_truth):
            self.assertEqual(detection.obb, truth[key].obb)
            self.assertEqual(detection.source, SourceTask.OOD)
        for detection, key in zip(perturbed.iseg, perturbed.iseg_truth):
            self.assertEqual(detection.contour, truth[key])
            self.assertEqual(detection.confidence, 0.9)

    def test_full_dropout(self):
        perturbed = perturb_detections(self.frame, NoiseModel(dropout_prob=1.0), seed=0)
        self.assertEqual((perturbed.ood, perturbed.iseg), ((), ()))

    def test_position_jitter(self):
        truth = {(trunk_id, component): contour.obb for trunk_id, component, contour in self.components}
        deviations = []
        for seed in range(20):
            perturbed = perturb_detections(self.frame, NoiseModel(position_jitter_px=2.0), seed=seed)
            for detection, key in zip(perturbed.ood, perturbed.ood_truth):
                deviations.append(detection.obb.cx - truth[key].cx)
                deviations.append(detection.obb.cy - truth[key].cy)
        self.assertAlmostEqual(float(np.mean(np.abs(deviations))), 2.0 * math.sqrt(2.0 / math.pi), delta=0.12)

    def test_clutter_is_unmatched(self):
        perturbed = perturb_detections(self.frame, NoiseModel(clutter_rate=5.0), seed=4)
        extra = len(perturbed.ood) - len(self.components)
        self.assertEqual(perturbed.ood_truth.count(None), extra)
        self.assertEqual(perturb_detections(self.frame, NoiseModel(clutter_rate=5.0), seed=4), perturbed)


class SequenceTest(TempDirMixin, SimpleTestCase):
    """Последовательности кадров"""

    def test_zero_velocity(self):
        sequence = gen_sequence(SceneSpec(scene=scene_params(), seed=6, trunk_count=3), 3, MotionRange())
        self.assertEqual([f.timestamp_s for f in sequence.frames], [0.0, 1 / 30, 2 / 30])
        for frame in sequence.frames[1:]:
            self.assertEqual(frame.instances, sequence.frames[0].instances)

    def test_exiting_trunks(self):
        spec = SceneSpec(scene=scene_params(), seed=6, trunk_count=4)
        sequence = gen_sequence(spec, 40, MotionRange(velocity_min=(40.0, 0.0), velocity_max=(40.0, 0.0)))
        visible = [{i.trunk_id for i in frame.instances} for frame in sequence.frames]
        self.assertEqual(visible[0], {1, 2, 3, 4})
        for previous, current in zip(visible, visible[1:]):
            self.assertLessEqual(current, previous)
        self.assertEqual(visible[-1], set())

    def test_output_passes_validation(self):
        spec = SceneSpec(scene=scene_params(irregularity=Intensity.MID), seed=12, trunk_count=5)
        sequence = gen_sequence(spec, 4, MotionRange(velocity_min=(-1.0, -1.0), velocity_max=(1.0, 1.0)))
        noise = NoiseModel(position_jitter_px=1.0, angle_jitter_rad=0.01, clutter_rate=1.0, confidence_sigma=0.05)
        write_ground_truth(self.tmp / 'gt.jsonl', sequence.frames)
        write_detections(self.tmp / 'dets.jsonl', perturb_sequence(sequence.frames, noise, spec.seed))
        self.assertEqual(len(load_ground_truth(self.tmp / 'gt.jsonl', check_quantity=True).frames), 4)
        self.assertEqual(len(load_detections(self.tmp / 'dets.jsonl')), 4)


class SimulateCommandTest(TempDirMixin, SimpleTestCase):
    """Команда simulate"""

    def test_writes_all_outputs(self):
        gt, dets, points = self.tmp / 'gt.jsonl', self.tmp / 'dets.jsonl', self.tmp / 'points.jsonl'
        call_command(
            'simulate', '--gt', str(gt), '--detections', str(dets), '--annotations', str(points),
            '--seed', '4', '--frames', '3', '--trunks', '3', '--distance', 'mid',
        )
        frames = load_ground_truth(gt).frames
        self.assertEqual(len(frames), 3)
        self.assertEqual([len(f.instances) for f in frames], [3, 3, 3])
        self.assertEqual(len(load_detections(dets)), 3)
        annotations = load_point_annotations(points)
        derived = derive_components(annotations[0].primitives, AnnotationConfig())
        self.assertEqual([trunk_id for trunk_id, _ in derived.trunks], [1, 2, 3])

    def test_rerun_is_identical(self):
        first, second = self.tmp / 'a.jsonl', self.tmp / 'b.jsonl'
        for path in (first, second):
            call_command('simulate', '--gt', str(path), '--seed', '21', '--quantity', 'mid', '--distance', 'high')
        self.assertEqual(first.read_bytes(), second.read_bytes())
