"""
Filename: tests.py
Path: src/apps/annotation/tests.py
Description: Тесты вывода компонентов из точечной разметки и команды annotate
"""
import json
import math

import numpy as np
from django.core.management import call_command
from django.test import SimpleTestCase
from shapely.ops import unary_union

from apps.geometry.models import Ellipse
from apps.geometry.utils.ellipses import fit_ellipse
from apps.records.models import ComponentClass, Intensity, SceneParameters
from apps.records.tests import TempDirMixin
from apps.records.utils.io import load_ground_truth
from apps.simulate.models import SceneSpec
from apps.simulate.utils.scene import build_scene

from .exceptions import InvalidPrimitive, MarkerOutsideRegion, UnpairedEdge
from .models import AnnotationConfig, ExportVariant, PointPrimitive, PrimitiveKind
from .utils.derive import derive_components, derive_trunk
from .utils.export import export_components, export_ground_truth

CONFIG = AnnotationConfig()
CUT_ELLIPSE = Ellipse(cx=100.0, cy=10.0, semi_major=10.0, semi_minor=4.0, rotation=math.pi / 2)


def primitive(kind, points, trunk_id=1):
    return PointPrimitive(kind=kind, points=tuple(map(tuple, points)), trunk_id=trunk_id)


def rectangle(trunk_id=1, y0=0.0, y1=20.0, marker=True):
    primitives = [
        primitive(PrimitiveKind.EDGE, [(0, y0), (100, y0)], trunk_id),
        primitive(PrimitiveKind.EDGE, [(0, y1), (100, y1)], trunk_id),
    ]
    if marker:
        primitives.append(primitive(PrimitiveKind.AREA_MARKER, [(50, (y0 + y1) / 2)], trunk_id))
    return primitives


def full_trunk():
    """Прямоугольный ствол со срезом справа и линией обратного среза слева"""
    line = [(0, 0), (3, 5), (4, 10), (3, 15), (0, 20)]
    return rectangle() + [
        primitive(PrimitiveKind.SECTION_AREA, CUT_ELLIPSE.outline(12).tolist()),
        primitive(PrimitiveKind.SECTION_LINE, line),
    ]


def polygon_iou(a, b):
    union = a.union(b).area
    return a.intersection(b).area / union if union else 0.0


class PrimitiveTest(SimpleTestCase):
    """Проверка примитивов"""

    def test_too_few_points(self):
        with self.assertRaises(InvalidPrimitive):
            primitive(PrimitiveKind.EDGE, [(0, 0)])
        with self.assertRaises(InvalidPrimitive):
            primitive(PrimitiveKind.SECTION_AREA, [(0, 0), (1, 0), (1, 1), (0, 1)])

    def test_marker_has_one_point(self):
        with self.assertRaises(InvalidPrimitive):
            primitive(PrimitiveKind.AREA_MARKER, [(0, 0), (1, 1)])

    def test_negative_trunk_id(self):
        with self.assertRaises(InvalidPrimitive):
            primitive(PrimitiveKind.AREA_MARKER, [(0, 0)], trunk_id=-1)


class DeriveTrunkTest(SimpleTestCase):
    """Вывод контуров одного ствола"""

    def test_rectangle_side(self):
        components = derive_trunk(1, rectangle(), CONFIG)
        self.assertEqual(list(components), [ComponentClass.SIDE])
        side = components[ComponentClass.SIDE]
        self.assertAlmostEqual(side.area, 2000.0, places=6)
        self.assertAlmostEqual(side.obb.width, 100.0, places=6)
        self.assertAlmostEqual(side.obb.height, 20.0, places=6)

    def test_section_area_fits_ellipse(self):
        ellipse = Ellipse(cx=50.0, cy=40.0, semi_major=20.0, semi_minor=8.0, rotation=0.4)
        points = ellipse.outline(12)
        self.assertLess(fit_ellipse(points).residual, 1e-6)

        components = derive_trunk(1, [primitive(PrimitiveKind.SECTION_AREA, points.tolist())], CONFIG)
        self.assertEqual(list(components), [ComponentClass.CUT])
        vertices = components[ComponentClass.CUT].as_array() - ellipse.center
        c, s = math.cos(ellipse.rotation), math.sin(ellipse.rotation)
        u = vertices[:, 0] * c + vertices[:, 1] * s
        v = -vertices[:, 0] * s + vertices[:, 1] * c
        np.testing.assert_allclose((u / 20.0) ** 2 + (v / 8.0) ** 2, 1.0, atol=1e-6)

    def test_component_order_and_disjointness(self):
        components = derive_trunk(1, full_trunk(), CONFIG)
        self.assertEqual(list(components), [ComponentClass.SIDE, ComponentClass.CUT, ComponentClass.BOUND])
        side = components[ComponentClass.SIDE].polygon
        for other in (ComponentClass.CUT, ComponentClass.BOUND):
            self.assertLess(side.intersection(components[other].polygon).area, 1e-6)

    def test_inset_straight_section_line(self):
        primitives = rectangle() + [primitive(PrimitiveKind.SECTION_LINE, [(10, 0), (10, 20)])]
        components = derive_trunk(1, primitives, CONFIG)
        bound = components[ComponentClass.BOUND]
        self.assertAlmostEqual(bound.area, 200.0, places=6)
        min_x, _, max_x, _ = bound.polygon.bounds
        self.assertAlmostEqual(min_x, 0.0, places=6)
        self.assertAlmostEqual(max_x, 10.0, places=6)
        self.assertAlmostEqual(components[ComponentClass.SIDE].area, 1800.0, places=6)

    def test_section_line_near_far_end(self):
        primitives = rectangle() + [primitive(PrimitiveKind.SECTION_LINE, [(70, 0), (70, 20)])]
        bound = derive_trunk(1, primitives, CONFIG)[ComponentClass.BOUND]
        self.assertAlmostEqual(bound.area, 600.0, places=6)
        self.assertAlmostEqual(bound.polygon.bounds[2], 100.0, places=6)

    def test_section_line_without_edges(self):
        line = [(0, 0), (3, 5), (4, 10), (3, 15), (0, 20)]
        primitives = [
            primitive(PrimitiveKind.SECTION_AREA, CUT_ELLIPSE.outline(12).tolist()),
            primitive(PrimitiveKind.SECTION_LINE, line),
        ]
        components = derive_trunk(1, primitives, CONFIG)
        self.assertEqual(list(components), [ComponentClass.CUT, ComponentClass.BOUND])
        self.assertAlmostEqual(components[ComponentClass.BOUND].area, 2 / 3 * 4 * 20, delta=8.0)

    def test_marker_outside_region(self):
        primitives = rectangle(marker=False) + [primitive(PrimitiveKind.AREA_MARKER, [(50, 60)])]
        with self.assertRaises(MarkerOutsideRegion):
            derive_trunk(1, primitives, CONFIG)

    def test_single_open_edge(self):
        with self.assertRaises(UnpairedEdge):
            derive_trunk(1, [primitive(PrimitiveKind.EDGE, [(0, 0), (50, 0), (100, 5)])], CONFIG)

    def test_single_closed_edge(self):
        closed = [(0, 0), (100, 0), (100, 20), (0, 20), (0, 0)]
        components = derive_trunk(1, [primitive(PrimitiveKind.EDGE, closed)], CONFIG)
        self.assertIn(ComponentClass.SIDE, components)
        self.assertGreater(components[ComponentClass.SIDE].area, 1500.0)


class DeriveComponentsTest(SimpleTestCase):
    """Вывод компонентов кадра"""

    def test_trunks_sorted_by_id(self):
        derived = derive_components(rectangle(trunk_id=3, y0=50, y1=70) + rectangle(trunk_id=2), CONFIG)
        self.assertEqual([trunk_id for trunk_id, _ in derived.trunks], [2, 3])
        self.assertEqual(derived.warnings, ())

    def test_live_trees(self):
        derived = derive_components(rectangle(trunk_id=0) + rectangle(trunk_id=0, y0=50, y1=70), CONFIG)
        self.assertEqual([trunk_id for trunk_id, _ in derived.trunks], [0, 0])
        centers = sorted(components[ComponentClass.SIDE].obb.cy for _, components in derived.trunks)
        self.assertAlmostEqual(centers[0], 10.0, places=6)
        self.assertAlmostEqual(centers[1], 60.0, places=6)

    def test_narrow_component_warning(self):
        derived = derive_components(rectangle(y0=0, y1=4), CONFIG)
        self.assertEqual(len(derived.trunks), 1)
        self.assertEqual(len(derived.warnings), 1)

    def test_simulated_trunks(self):
        scene = SceneParameters(
            entropy=Intensity.MID, quantity=Intensity.LOW, distance=Intensity.MID, irregularity=Intensity.MID,
        )
        for seed in range(5):
            simulated = build_scene(SceneSpec(scene=scene, seed=seed))
            primitives = [p for trunk in simulated.trunks for p in trunk.primitives]
            derived = dict(derive_components(primitives, CONFIG).trunks)
            for trunk in simulated.trunks:
                components = derived[trunk.trunk_id]
                self.assertEqual(set(components), set(trunk.shapes))
                for component, shape in trunk.shapes.items():
                    with self.subTest(seed=seed, trunk=trunk.trunk_id, component=component.value):
                        self.assertGreaterEqual(polygon_iou(components[component].polygon, shape), 0.98)


class ExportTest(SimpleTestCase):
    """Варианты экспорта"""

    def setUp(self):
        self.derived = derive_components(full_trunk(), CONFIG)
        self.components = dict(self.derived.trunks)[1]

    def test_three_class(self):
        self.assertEqual(set(export_components(self.components, ExportVariant.THREE_CLASS)), {
            ComponentClass.SIDE, ComponentClass.CUT, ComponentClass.BOUND,
        })

    def test_two_class_drops_bound(self):
        exported = export_components(self.components, ExportVariant.TWO_CLASS)
        self.assertEqual(set(exported), {ComponentClass.SIDE, ComponentClass.CUT})

    def test_single_trunk_is_union(self):
        exported = export_components(self.components, ExportVariant.SINGLE_TRUNK)
        self.assertEqual(list(exported), [ComponentClass.TRUNK])
        union = unary_union([contour.polygon for contour in self.components.values()])
        self.assertAlmostEqual(exported[ComponentClass.TRUNK].area, union.area, delta=1e-6 * union.area)

    def test_obb_target_of_rectangle(self):
        frame, targets = export_ground_truth(derive_components(rectangle(), CONFIG), ExportVariant.THREE_CLASS)
        self.assertEqual(len(frame.instances), 1)
        self.assertEqual(len(targets), 1)
        trunk_id, component, obb = targets[0]
        self.assertEqual((trunk_id, component), (1, ComponentClass.SIDE))
        self.assertAlmostEqual(obb.cx, 50.0, places=6)
        self.assertAlmostEqual(obb.cy, 10.0, places=6)
        self.assertAlmostEqual(obb.width, 100.0, places=6)
        self.assertAlmostEqual(obb.height, 20.0, places=6)
        self.assertLess(min(obb.angle, math.pi - obb.angle), 1e-9)

    def test_clipped_to_image(self):
        frame, _ = export_ground_truth(
            derive_components(rectangle(), CONFIG), ExportVariant.THREE_CLASS, image_size=(60, 40),
        )
        side = frame.instances[0].components[ComponentClass.SIDE]
        self.assertAlmostEqual(side.area, 1200.0, places=6)
        self.assertEqual(frame.image_size, (60, 40))


class AnnotateCommandTest(TempDirMixin, SimpleTestCase):
    """Команда annotate"""

    def test_two_class_with_targets(self):
        primitives = [
            {'kind': p.kind.value, 'trunk_id': p.trunk_id, 'points': [list(point) for point in p.points]}
            for p in full_trunk()
        ]
        path = self.write_lines('points.jsonl', [
            {'frame_id': 0, 'timestamp_s': 0.0, 'image_size': [200, 100], 'primitives': primitives},
        ])
        output = self.tmp / 'gt.jsonl'
        targets = self.tmp / 'targets.jsonl'
        call_command(
            'annotate', '--input', str(path), '--output', str(output),
            '--variant', 'two_class', '--targets', str(targets),
        )
        frames = load_ground_truth(output).frames
        self.assertEqual(len(frames), 1)
        self.assertEqual(set(frames[0].instances[0].components), {ComponentClass.SIDE, ComponentClass.CUT})

        records = [json.loads(line) for line in targets.read_text(encoding='utf-8').splitlines()]
        self.assertEqual(len(records), 1)
        self.assertEqual(sorted(t['class'] for t in records[0]['targets']), ['cut', 'side'])
