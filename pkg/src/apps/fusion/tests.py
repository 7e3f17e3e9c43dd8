"""
Filename: tests.py
Path: src/apps/fusion/tests.py
Description: Тесты назначения, сопоставления задач, группировки компонентов и средней оси
"""
import itertools
import math

import numpy as np
from django.core.management import call_command
from django.test import SimpleTestCase

from apps.geometry.models import Contour, OrientedBox
from apps.records.models import ComponentClass, Detection, DetectionFrame, Intensity, SceneParameters, SourceTask
from apps.records.tests import TempDirMixin
from apps.records.utils.io import write_detections
from apps.simulate.models import NoiseModel, SceneSpec
from apps.simulate.utils.noise import perturb_detections
from apps.simulate.utils.scene import build_scene

from .exceptions import EmptyGroup
from .models import ComponentInstance, FusionConfig, UnmatchedPolicy
from .utils.assignment import assign_with_threshold, linear_sum_assignment
from .utils.axis import derive_axis
from .utils.io import load_fused
from .utils.matching import cut_side_affinity, match_components, match_tasks
from .utils.pipeline import fuse_frame


def brute_force_cost(cost):
    rows, cols = cost.shape
    if rows <= cols:
        return min(sum(cost[r, c] for r, c in zip(range(rows), perm)) for perm in itertools.permutations(range(cols), rows))
    return min(sum(cost[r, c] for c, r in zip(range(cols), perm)) for perm in itertools.permutations(range(rows), cols))


def instance(component, box, confidence=0.9, task_matched=True):
    return ComponentInstance(component=component, obb=box, confidence=confidence, task_matched=task_matched)


def ood(component, box, confidence=0.9):
    return Detection(component, confidence, SourceTask.OOD, obb=box)


def iseg(component, box, confidence=0.9):
    return Detection(component, confidence, SourceTask.ISEG, contour=Contour.from_points(box.corners))


def simulated_frame(seed, noise=None):
    scene = SceneParameters(
        entropy=Intensity.LOW, quantity=Intensity.LOW, distance=Intensity.MID, irregularity=Intensity.LOW,
    )
    frame = build_scene(SceneSpec(scene=scene, seed=seed)).frame
    return frame, perturb_detections(frame, noise or NoiseModel(), seed)


class AssignmentTest(SimpleTestCase):
    """Задача о назначениях"""

    def test_trivial(self):
        self.assertEqual(linear_sum_assignment([[5]]), [(0, 0)])

    def test_two_by_two(self):
        pairs = linear_sum_assignment([[1, 2], [2, 4]])
        self.assertEqual(pairs, [(0, 1), (1, 0)])
        cost = np.array([[1, 2], [2, 4]])
        self.assertEqual(sum(cost[r, c] for r, c in pairs), 4)

    def test_empty(self):
        self.assertEqual(linear_sum_assignment(np.zeros((0, 3))), [])

    def test_matches_brute_force(self):
        rng = np.random.default_rng(31)
        for _ in range(1000):
            rows, cols = int(rng.integers(1, 7)), int(rng.integers(1, 7))
            cost = rng.uniform(0, 10, size=(rows, cols))
            pairs = linear_sum_assignment(cost)
            self.assertEqual(len(pairs), min(rows, cols))
            self.assertEqual(len({r for r, _ in pairs}), len(pairs))
            self.assertEqual(len({c for _, c in pairs}), len(pairs))
            self.assertAlmostEqual(sum(cost[r, c] for r, c in pairs), brute_force_cost(cost), places=9)

    def test_threshold_drops_expensive_pairs(self):
        pairs, free_rows, free_cols = assign_with_threshold([[0.1, 0.95], [0.97, 0.99]], 0.9)
        self.assertEqual(pairs, [(0, 0)])
        self.assertEqual(free_rows, [1])
        self.assertEqual(free_cols, [1])

    def test_blocked_pair_does_not_displace_valid_one(self):
        pairs, _, _ = assign_with_threshold([[0.05, 0.5], [0.5, 2.0]], 0.6)
        self.assertEqual(pairs, [(0, 1), (1, 0)])
        # Оптимум без порога (0, 1) + (1, 0) целиком отбрасывается, пара (0, 0) остается
        pairs, _, _ = assign_with_threshold([[0.05, 0.5], [0.5, 2.0]], 0.3)
        self.assertEqual(pairs, [(0, 0)])


class MatchTasksTest(SimpleTestCase):
    """Сопоставление OOD и ISEG"""

    def setUp(self):
        self.config = FusionConfig()

    def test_identical_box_and_contour(self):
        box = OrientedBox(50, 40, 30, 8, 0.3)
        matched, free_ood, free_iseg = match_tasks(
            [ood(ComponentClass.SIDE, box, 0.6)], [iseg(ComponentClass.SIDE, box, 0.8)],
            ComponentClass.SIDE, self.config,
        )
        self.assertEqual(len(matched), 1)
        self.assertEqual((free_ood, free_iseg), ([], []))
        self.assertTrue(matched[0].task_matched)
        self.assertEqual(matched[0].obb, box)
        self.assertAlmostEqual(matched[0].confidence, 0.8)

    def test_disjoint_box_and_contour(self):
        matched, free_ood, free_iseg = match_tasks(
            [ood(ComponentClass.CUT, OrientedBox(0, 0, 4, 4, 0))],
            [iseg(ComponentClass.CUT, OrientedBox(100, 100, 4, 4, 0))],
            ComponentClass.CUT, self.config,
        )
        self.assertEqual(matched, [])
        self.assertEqual(len(free_ood), 1)
        self.assertEqual(len(free_iseg), 1)

    def test_mean_confidence(self):
        box = OrientedBox(0, 0, 10, 3, 0)
        config = FusionConfig(confidence_merge='mean')
        matched, _, _ = match_tasks(
            [ood(ComponentClass.SIDE, box, 0.6)], [iseg(ComponentClass.SIDE, box, 0.8)], ComponentClass.SIDE, config,
        )
        self.assertAlmostEqual(matched[0].confidence, 0.7)

    def test_recovers_simulated_pairing(self):
        noise = NoiseModel(position_jitter_px=1.0)
        for seed in range(3):
            _, perturbed = simulated_frame(seed, noise)
            sides = [i for i, d in enumerate(perturbed.ood) if d.component == ComponentClass.SIDE]
            segs = [i for i, d in enumerate(perturbed.iseg) if d.component == ComponentClass.SIDE]
            rng = np.random.default_rng(seed)
            segs = list(rng.permutation(segs))
            matched, free_ood, free_iseg = match_tasks(
                [perturbed.ood[i] for i in sides], [perturbed.iseg[j] for j in segs],
                ComponentClass.SIDE, self.config,
            )
            self.assertEqual((free_ood, free_iseg), ([], []))
            by_contour = {perturbed.iseg[j].contour: perturbed.iseg_truth[j] for j in segs}
            by_box = {perturbed.ood[i].obb: perturbed.ood_truth[i] for i in sides}
            for item in matched:
                self.assertEqual(by_box[item.obb], by_contour[item.contour])


class AffinityTest(SimpleTestCase):
    """Сродство среза и боковой поверхности"""

    def setUp(self):
        self.side = instance(ComponentClass.SIDE, OrientedBox(0, 0, 10, 2, 0))

    def test_short_edge_inside_cut(self):
        cut = instance(ComponentClass.CUT, OrientedBox(5, 0, 3, 3, 0))
        self.assertEqual(cut_side_affinity(cut, self.side), 1.0)

    def test_disjoint(self):
        cut = instance(ComponentClass.CUT, OrientedBox(40, 40, 3, 3, 0))
        self.assertEqual(cut_side_affinity(cut, self.side), 0.0)

    def test_half_edge(self):
        # Короткая сторона x = 5, y в [-1, 1]; бокс среза покрывает y в [0, 2]
        cut = instance(ComponentClass.CUT, OrientedBox(5, 1, 2, 1, math.pi / 2))
        self.assertAlmostEqual(cut_side_affinity(cut, self.side), 0.5, places=9)


class MatchComponentsTest(SimpleTestCase):
    """Группировка компонентов"""

    def setUp(self):
        self.config = FusionConfig()

    def test_coaxial_cut(self):
        side = instance(ComponentClass.SIDE, OrientedBox(0, 0, 10, 2, 0))
        cut = instance(ComponentClass.CUT, OrientedBox(5, 0, 2.5, 0.8, math.pi / 2))
        groups = match_components([cut, side], self.config)
        self.assertEqual(groups, [{ComponentClass.SIDE: side, ComponentClass.CUT: cut}])

    def test_two_parallel_logs(self):
        sides = [
            instance(ComponentClass.SIDE, OrientedBox(0, 0, 10, 2, 0)),
            instance(ComponentClass.SIDE, OrientedBox(0, 3, 10, 2, 0)),
        ]
        cuts = [
            instance(ComponentClass.CUT, OrientedBox(5, 3, 2.2, 0.8, math.pi / 2)),
            instance(ComponentClass.CUT, OrientedBox(5, 0, 2.2, 0.8, math.pi / 2)),
        ]
        groups = match_components(cuts + sides, self.config)
        self.assertEqual(len(groups), 2)
        self.assertIs(groups[0][ComponentClass.CUT], cuts[1])
        self.assertIs(groups[1][ComponentClass.CUT], cuts[0])

    def test_zero_affinity_cut_is_singleton(self):
        side = instance(ComponentClass.SIDE, OrientedBox(0, 0, 10, 2, 0))
        cut = instance(ComponentClass.CUT, OrientedBox(50, 50, 2, 2, 0))
        groups = match_components([side, cut], self.config)
        self.assertEqual(groups, [{ComponentClass.SIDE: side}, {ComponentClass.CUT: cut}])

    def test_require_both_drops_single_task_singletons(self):
        side = instance(ComponentClass.SIDE, OrientedBox(0, 0, 10, 2, 0), task_matched=True)
        cut = instance(ComponentClass.CUT, OrientedBox(50, 50, 2, 2, 0), task_matched=False)
        config = FusionConfig(unmatched_policy=UnmatchedPolicy.REQUIRE_BOTH)
        self.assertEqual(match_components([side, cut], config), [{ComponentClass.SIDE: side}])


class DeriveAxisTest(SimpleTestCase):
    """Концы средней оси"""

    def assertPoint(self, actual, expected):
        self.assertAlmostEqual(actual[0], expected[0], places=9)
        self.assertAlmostEqual(actual[1], expected[1], places=9)

    def test_side_only(self):
        side = instance(ComponentClass.SIDE, OrientedBox(0, 0, 10, 2, 0))
        (first, second), center = derive_axis({ComponentClass.SIDE: side})
        self.assertPoint(first, (-5, 0))
        self.assertPoint(second, (5, 0))
        self.assertIsNone(center)

    def test_cut_replaces_nearer_end(self):
        side = instance(ComponentClass.SIDE, OrientedBox(0, 0, 10, 2, 0))
        cut = instance(ComponentClass.CUT, OrientedBox(5.2, 0.1, 2, 0.8, math.pi / 2))
        (first, second), center = derive_axis({ComponentClass.SIDE: side, ComponentClass.CUT: cut})
        self.assertPoint(first, (-5, 0))
        self.assertPoint(second, (5.2, 0.1))
        self.assertPoint(center, (5.2, 0.1))

    def test_cut_only(self):
        cut = instance(ComponentClass.CUT, OrientedBox(3, 3, 2, 2, 0))
        (first, second), center = derive_axis({ComponentClass.CUT: cut})
        self.assertPoint(first, (2, 3))
        self.assertPoint(second, (4, 3))
        self.assertPoint(center, (3, 3))

    def test_empty_group(self):
        with self.assertRaises(EmptyGroup):
            derive_axis({})


class FuseFrameTest(TempDirMixin, SimpleTestCase):
    """Слияние кадра"""

    def setUp(self):
        super().setUp()
        self.config = FusionConfig()

    def test_empty(self):
        self.assertEqual(fuse_frame([], [], self.config), [])

    def test_ood_only_cut(self):
        trunks = fuse_frame([ood(ComponentClass.CUT, OrientedBox(3, 3, 2, 2, 0))], [], self.config)
        self.assertEqual(len(trunks), 1)
        self.assertEqual(list(trunks[0].components), [ComponentClass.CUT])
        self.assertIsNone(trunks[0].side)

    def test_confidence_filter(self):
        trunks = fuse_frame([ood(ComponentClass.SIDE, OrientedBox(0, 0, 10, 2, 0), 0.2)], [], self.config)
        self.assertEqual(trunks, [])

    def test_zero_noise_recovers_trunks(self):
        for seed in range(100):
            frame, perturbed = simulated_frame(seed)
            trunks = fuse_frame(perturbed.ood, perturbed.iseg, self.config)
            self.assertEqual(len(trunks), len(frame.instances))
            expected = sorted(
                sorted(tuple(c.obb.to_list()) for c in gt.components.values()) for gt in frame.instances
            )
            actual = sorted(
                sorted(tuple(c.obb.to_list()) for c in trunk.components.values()) for trunk in trunks
            )
            self.assertEqual(actual, expected)
            for trunk in trunks:
                self.assertTrue(all(c.task_matched for c in trunk.components.values()))

    def test_grouping_accuracy_under_jitter(self):
        noise = NoiseModel(position_jitter_px=2.0)
        accuracies = []
        for seed in range(100):
            frame, perturbed = simulated_frame(seed, noise)
            truth = {id(d.obb): key for d, key in zip(perturbed.ood, perturbed.ood_truth)}
            truth.update({id(d.contour): key for d, key in zip(perturbed.iseg, perturbed.iseg_truth)})
            recovered = set()
            for trunk in fuse_frame(perturbed.ood, perturbed.iseg, self.config):
                keys = {truth.get(id(c.obb)) for c in trunk.components.values()}
                keys |= {truth.get(id(c.contour)) for c in trunk.components.values() if c.contour is not None}
                keys.discard(None)
                trunk_ids = {trunk_id for trunk_id, _ in keys}
                if len(trunk_ids) == 1:
                    recovered.add((trunk_ids.pop(), frozenset(trunk.components)))
            correct = sum(1 for gt in frame.instances if (gt.trunk_id, frozenset(gt.components)) in recovered)
            accuracies.append(correct / len(frame.instances))
        self.assertGreaterEqual(float(np.mean(accuracies)), 0.95)

    def test_permutation_invariance(self):
        noise = NoiseModel(position_jitter_px=2.0, angle_jitter_rad=0.02, clutter_rate=2.0, confidence_sigma=0.1)
        rng = np.random.default_rng(5)
        for seed in range(3):
            _, perturbed = simulated_frame(seed, noise)
            expected = fuse_frame(perturbed.ood, perturbed.iseg, self.config)
            for _ in range(3):
                shuffled_ood = [perturbed.ood[i] for i in rng.permutation(len(perturbed.ood))]
                shuffled_iseg = [perturbed.iseg[i] for i in rng.permutation(len(perturbed.iseg))]
                self.assertEqual(fuse_frame(shuffled_ood, shuffled_iseg, self.config), expected)

    def test_invariants(self):
        noise = NoiseModel(position_jitter_px=2.0, size_jitter_frac=0.05, clutter_rate=1.0)
        for seed in range(5):
            _, perturbed = simulated_frame(seed, noise)
            trunks = fuse_frame(perturbed.ood, perturbed.iseg, self.config)
            used = [id(c) for t in trunks for c in t.components.values()]
            self.assertEqual(len(used), len(set(used)))
            for trunk in trunks:
                self.assertEqual(len(trunk.endpoints), 2)
                for point in trunk.endpoints:
                    self.assertTrue(trunk.envelope.contains_point(point, slack=1.0))

    def test_fuse_command(self):
        frame, perturbed = simulated_frame(1)
        path = self.tmp / 'dets.jsonl'
        write_detections(path, [DetectionFrame(0, 0.0, perturbed.ood + perturbed.iseg)])
        output = self.tmp / 'fused.jsonl'
        call_command('fuse', '--detections', str(path), '--output', str(output))
        frames = load_fused(output)
        self.assertEqual(len(frames), 1)
        self.assertEqual(len(frames[0].trunks), len(frame.instances))
