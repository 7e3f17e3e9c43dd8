"""
Filename: tests.py
Path: src/apps/tracking/tests.py
Description: Тесты фильтра Калмана, трекера и команды track
"""
import math
import time
from dataclasses import replace

import numpy as np
from django.core.management import call_command
from django.test import SimpleTestCase

from apps.fusion.models import ComponentInstance, FusedFrame, FusionConfig, UnifiedTrunk
from apps.fusion.utils.io import write_fused
from apps.fusion.utils.pipeline import fuse_sequence
from apps.geometry.models import OrientedBox
from apps.metrics.utils.mot import accumulate, clear_mot, id_metrics, identity_scores, score_frames
from apps.records.models import ComponentClass, Intensity, SceneParameters
from apps.records.tests import TempDirMixin
from apps.records.utils.io import write_detections
from apps.simulate.models import MotionRange, NoiseModel, SceneSpec
from apps.simulate.utils.noise import perturb_sequence
from apps.simulate.utils.sequence import gen_sequence

from .exceptions import NonMonotonicTimestamp
from .models import TrackerConfig, TrackerPreset
from .utils.io import load_tracks
from .utils.kalman import KalmanBoxFilter, wrap_half_turn
from .utils.tracker import TrunkTracker, track_sequence

FPS = 30.0


def trunk(box, confidence=0.9):
    side = ComponentInstance(component=ComponentClass.SIDE, obb=box, confidence=confidence, task_matched=True)
    return UnifiedTrunk(envelope=box, endpoints=box.short_edge_midpoints(), side=side)


def fused_frames(boxes_per_frame, confidence=0.9):
    return [
        FusedFrame(frame_id=k, timestamp_s=k / FPS, trunks=tuple(trunk(b, confidence) for b in boxes))
        for k, boxes in enumerate(boxes_per_frame)
    ]


def ids_per_frame(frames):
    return [[t.track_id for t in frame.tracks] for frame in frames]


class KalmanFilterTest(SimpleTestCase):
    """Фильтр Калмана для повернутых боксов"""

    def setUp(self):
        self.kalman = KalmanBoxFilter(TrackerConfig())
        self.box = OrientedBox(100.0, 50.0, 40.0, 10.0, 0.3)

    def test_wrap_half_turn(self):
        self.assertAlmostEqual(wrap_half_turn(math.pi), 0.0, places=12)
        self.assertAlmostEqual(wrap_half_turn(math.pi / 2), math.pi / 2, places=12)
        self.assertAlmostEqual(wrap_half_turn(-math.pi / 2 - 0.1), math.pi / 2 - 0.1, places=12)

    def test_predict_zero_velocity(self):
        state = self.kalman.initiate(self.box)
        predicted = self.kalman.predict(state)
        np.testing.assert_allclose(predicted.mean[:5], state.mean[:5])
        self.assertGreater(np.trace(predicted.covariance), np.trace(state.covariance))

    def test_predict_unit_velocity(self):
        state = self.kalman.initiate(self.box)
        state.mean[5] = 1.0
        predicted = self.kalman.predict(state, dt=1.0)
        self.assertAlmostEqual(predicted.mean[0], 101.0, places=12)
        self.assertAlmostEqual(predicted.mean[1], 50.0, places=12)

    def test_constant_velocity_prediction(self):
        state = self.kalman.initiate(self.box)
        velocity = np.array([1.5, -0.5, 0.0, 0.0, 0.001])
        state.mean[5:] = velocity
        for _ in range(20):
            state = self.kalman.predict(state)
        expected = np.array([100.0, 50.0, 40.0, 10.0, 0.3]) + 20 * velocity
        self.assertLess(np.abs(state.mean[:5] - expected).max(), 1e-9)

    def test_update_with_predicted_mean(self):
        state = self.kalman.predict(self.kalman.initiate(self.box))
        updated = self.kalman.update(state, self.kalman.box(state))
        np.testing.assert_allclose(updated.mean, state.mean, atol=1e-9)
        self.assertLess(np.trace(updated.covariance), np.trace(state.covariance))

    def test_half_turn_measurement_has_zero_innovation(self):
        state = self.kalman.predict(self.kalman.initiate(self.box))
        same = self.kalman.update(state, self.box)
        flipped = self.kalman.update(state, replace(self.box, angle=self.box.angle + math.pi))
        np.testing.assert_allclose(flipped.mean, same.mean, atol=1e-9)

    def test_converges_to_fixed_measurement(self):
        target = OrientedBox(102.0, 48.5, 41.0, 10.5, 0.35)
        state = self.kalman.initiate(self.box)
        for _ in range(200):
            state = self.kalman.update(self.kalman.predict(state), target)
        np.testing.assert_allclose(state.mean[:5], target.to_list(), atol=1e-6)
        np.testing.assert_allclose(state.mean[5:], np.zeros(5), atol=1e-6)

    def test_covariance_stays_positive_definite(self):
        rng = np.random.default_rng(17)
        state = self.kalman.initiate(self.box)
        for step in range(10_000):
            state = self.kalman.predict(state, dt=float(rng.uniform(0.5, 3.0)))
            if rng.random() < 0.8:
                cx, cy = state.mean[:2] + rng.normal(0, 3, size=2)
                box = OrientedBox(float(cx), float(cy), float(rng.uniform(20, 60)),
                                  float(rng.uniform(5, 15)), float(rng.uniform(0, math.pi)))
                state = self.kalman.update(state, box)
            if step % 100 == 0:
                np.testing.assert_allclose(state.covariance, state.covariance.T)
                self.assertGreater(np.linalg.eigvalsh(state.covariance).min(), 0.0)


class TrackerTest(SimpleTestCase):
    """Двухэтапный трекер"""

    def test_stationary_trunk(self):
        box = OrientedBox(200, 100, 120, 20, 0.2)
        frames = track_sequence(fused_frames([[box]] * 10), TrackerConfig())
        self.assertEqual(ids_per_frame(frames), [[1]] * 10)

    def test_occlusion_gap(self):
        boxes = [[OrientedBox(100 + 2 * k, 80, 100, 20, 0.0)] if not 10 <= k < 13 else [] for k in range(21)]
        frames = track_sequence(fused_frames(boxes), TrackerConfig())
        ids = ids_per_frame(frames)
        self.assertEqual(ids[:10], [[1]] * 10)
        self.assertEqual(ids[10:13], [[], [], []])
        self.assertEqual(ids[13:], [[1]] * 8)

    def test_low_confidence_does_not_spawn(self):
        config = TrackerConfig.preset_config(TrackerPreset.OPTIMIZED)
        tracker = TrunkTracker(config)
        self.assertEqual(tracker.step([trunk(OrientedBox(50, 50, 40, 10, 0), 0.04)], 0.0), [])
        self.assertEqual(tracker.tracks, [])

    def test_optimized_preset(self):
        config = TrackerConfig.preset_config(TrackerPreset.OPTIMIZED)
        self.assertEqual(config.new_track_thresh, 0.05)
        self.assertEqual(config.match_thresh, 0.9)
        tracker = TrunkTracker(config)
        self.assertEqual(len(tracker.step([trunk(OrientedBox(50, 50, 40, 10, 0), 0.3)], 0.0)), 1)
        # Стандартный порог 0.6 не дает создать трек с той же уверенностью
        tracker = TrunkTracker(TrackerConfig.preset_config(TrackerPreset.BYTETRACK))
        self.assertEqual(tracker.step([trunk(OrientedBox(50, 50, 40, 10, 0), 0.3)], 0.0), [])

    def test_ids_increase_without_reuse(self):
        tracker = TrunkTracker(replace(TrackerConfig(), track_buffer=0))
        seen = []
        for k in range(6):
            # Каждый кадр - новый ствол в другом месте
            result = tracker.step([trunk(OrientedBox(100 * k, 0, 40, 10, 0))], k / FPS)
            seen.extend(track_id for track_id, _ in result)
        self.assertEqual(seen, [1, 2, 3, 4, 5, 6])

    def test_non_monotonic_timestamp(self):
        tracker = TrunkTracker(TrackerConfig())
        tracker.step([], 1.0)
        with self.assertRaises(NonMonotonicTimestamp):
            tracker.step([], 1.0)

    def test_frame_step(self):
        boxes = [[OrientedBox(100 + k, 80, 100, 20, 0.0)] for k in range(12)]
        frames = track_sequence(fused_frames(boxes), replace(TrackerConfig(), frame_step=3))
        self.assertEqual([f.frame_id for f in frames], [0, 3, 6, 9])
        self.assertEqual(ids_per_frame(frames), [[1]] * 4)

    def test_simulated_sequence(self):
        scene = SceneParameters(
            entropy=Intensity.LOW, quantity=Intensity.LOW, distance=Intensity.MID, irregularity=Intensity.LOW,
        )
        spec = SceneSpec(scene=scene, seed=3, trunk_count=5)
        motion = MotionRange(velocity_min=(0.5, 0.25), velocity_max=(0.5, 0.25))
        sequence = gen_sequence(spec, 10, motion)
        detections = perturb_sequence(sequence.frames, NoiseModel(), spec.seed)
        tracks = track_sequence(fuse_sequence(detections, FusionConfig()), TrackerConfig())
        _, metrics, undefined = clear_mot(sequence.frames, tracks)
        self.assertEqual(undefined, [])
        self.assertEqual(metrics['mota'], 1.0)
        self.assertEqual(metrics['switches'], 0)
        identity, _ = id_metrics(sequence.frames, tracks)
        self.assertEqual(identity['idf1'], 1.0)


class TrackingOracleTest(SimpleTestCase):
    """Трекинг без шума на случайных сценах со сдвигом камеры"""

    def test_noise_free_sequences(self):
        failures = []
        for seed in range(100):
            rng = np.random.default_rng(seed)
            count = int(rng.integers(1, 11))
            velocity = tuple(float(v) for v in rng.uniform(-3.0, 3.0, size=2))
            scene = SceneParameters(
                entropy=Intensity.MID, quantity=Intensity.for_quantity(count),
                distance=Intensity.MID, irregularity=Intensity.LOW,
            )
            spec = SceneSpec(scene=scene, seed=seed, trunk_count=count)
            sequence = gen_sequence(spec, 30, MotionRange(velocity_min=velocity, velocity_max=velocity))
            detections = perturb_sequence(sequence.frames, NoiseModel(), spec.seed)
            tracks = track_sequence(fuse_sequence(detections, FusionConfig()), TrackerConfig())
            scores = score_frames(sequence.frames, tracks)
            metrics, _ = accumulate(scores).summary()
            identity, _ = identity_scores(scores)
            if (metrics['mota'], identity['idf1'], metrics['switches']) != (1.0, 1.0, 0):
                failures.append((seed, metrics['mota'], identity['idf1'], metrics['switches']))
        self.assertEqual(failures, [])

    def test_clipped_trunks_fuse_whole(self):
        scene = SceneParameters(
            entropy=Intensity.HIGH, quantity=Intensity.LOW, distance=Intensity.MID, irregularity=Intensity.MID,
        )
        spec = SceneSpec(scene=scene, seed=1, trunk_count=4)
        motion = MotionRange(velocity_min=(12.0, 6.0), velocity_max=(12.0, 6.0))
        sequence = gen_sequence(spec, 30, motion)
        detections = perturb_sequence(sequence.frames, NoiseModel(), spec.seed)
        fused = fuse_sequence(detections, FusionConfig())
        for truth, frame in zip(sequence.frames, fused):
            self.assertEqual(len(frame.trunks), len(truth.instances))


class ThroughputTest(SimpleTestCase):
    """Скорость слияния и трекинга на плотной сцене"""

    def test_thirty_trunks(self):
        scene = SceneParameters(
            entropy=Intensity.MID, quantity=Intensity.HIGH, distance=Intensity.HIGH, irregularity=Intensity.LOW,
        )
        spec = SceneSpec(scene=scene, seed=2, trunk_count=30)
        motion = MotionRange(velocity_min=(1.0, 0.5), velocity_max=(1.0, 0.5))
        sequence = gen_sequence(spec, 60, motion)
        detections = perturb_sequence(sequence.frames, NoiseModel(position_jitter_px=1.0), spec.seed)
        started = time.perf_counter()
        tracks = track_sequence(fuse_sequence(detections, FusionConfig()), TrackerConfig())
        elapsed = time.perf_counter() - started
        self.assertEqual(len(tracks), 60)
        # Запас на медленные машины CI
        self.assertGreater(len(tracks) / elapsed, 50.0)


class TrackCommandTest(TempDirMixin, SimpleTestCase):
    """Команда track"""

    def test_fused_input(self):
        path = self.tmp / 'fused.jsonl'
        write_fused(path, fused_frames([[OrientedBox(200, 100, 120, 20, 0.2)]] * 4))
        output = self.tmp / 'tracks.jsonl'
        call_command('track', '--input', str(path), '--output', str(output))
        self.assertEqual(ids_per_frame(load_tracks(output)), [[1]] * 4)

    def test_detections_input(self):
        scene = SceneParameters(
            entropy=Intensity.LOW, quantity=Intensity.LOW, distance=Intensity.MID, irregularity=Intensity.LOW,
        )
        spec = SceneSpec(scene=scene, seed=8, trunk_count=3)
        sequence = gen_sequence(spec, 3, MotionRange())
        path = self.tmp / 'dets.jsonl'
        write_detections(path, perturb_sequence(sequence.frames, NoiseModel(), spec.seed))
        output = self.tmp / 'tracks.jsonl'
        call_command('track', '--input', str(path), '--output', str(output), '--tracker', 'optimized')
        frames = load_tracks(output)
        self.assertEqual(len(frames), 3)
        self.assertEqual(ids_per_frame(frames), [[1, 2, 3]] * 3)
