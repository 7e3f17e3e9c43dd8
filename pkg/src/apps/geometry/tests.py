"""
Filename: tests.py
Path: src/apps/geometry/tests.py
Description: Тесты геометрических примитивов и алгоритмов
"""
import math

import numpy as np
from django.test import SimpleTestCase

from .exceptions import (
    DegenerateGeometry, EmptyInput, NonPositiveExtent, NotAnEllipse,
    SelfIntersection, TooFewPoints, ZeroLengthSegment,
)
from .models import Contour, OrientedBox, Segment
from .utils.boxes import (
    canonicalize_obb, envelope_obb, obb_intersection_area, obb_iou, segment_inside_fraction,
)
from .utils.calipers import min_area_obb
from .utils.ellipses import fit_ellipse
from .utils.splines import sample_spline


def random_box(rng, spread=4.0):
    return OrientedBox(
        float(rng.uniform(-spread, spread)), float(rng.uniform(-spread, spread)),
        float(rng.uniform(0.5, 4.0)), float(rng.uniform(0.5, 4.0)),
        float(rng.uniform(0.0, 2.0 * math.pi)),
    )


def monte_carlo_intersection(a, b, rng, samples):
    """Оценка площади пересечения выборкой точек в окне бокса a"""
    ux, uy = a.axis
    u = rng.uniform(-0.5, 0.5, samples) * a.width
    v = rng.uniform(-0.5, 0.5, samples) * a.height
    xs = a.cx + u * ux - v * uy
    ys = a.cy + u * uy + v * ux
    bx, by = b.axis
    du, dv = xs - b.cx, ys - b.cy
    along = du * bx + dv * by
    across = -du * by + dv * bx
    inside = (np.abs(along) <= b.width / 2) & (np.abs(across) <= b.height / 2)
    return a.area * inside.mean()


def sweep_min_area(points, step_deg=0.1):
    """Перебор ориентаций с шагом 0.1 градуса"""
    pts = np.asarray(points, dtype=float)
    best = math.inf
    for theta in np.deg2rad(np.arange(0.0, 90.0, step_deg)):
        c, s = math.cos(theta), math.sin(theta)
        a = pts[:, 0] * c + pts[:, 1] * s
        b = -pts[:, 0] * s + pts[:, 1] * c
        best = min(best, (a.max() - a.min()) * (b.max() - b.min()))
    return best


class CanonicalizeTest(SimpleTestCase):
    """Каноническая форма бокса"""

    def assertBoxAlmostEqual(self, box, expected, places=9):
        for got, want in zip(box.to_list(), expected):
            self.assertAlmostEqual(got, want, places=places)

    def test_already_canonical_is_unchanged(self):
        box = OrientedBox(0, 0, 2, 1, 0)
        self.assertIs(canonicalize_obb(box), box)

    def test_side_swap(self):
        self.assertBoxAlmostEqual(canonicalize_obb(OrientedBox(0, 0, 1, 2, 0)), [0, 0, 2, 1, math.pi / 2])

    def test_angle_modulo_pi(self):
        self.assertBoxAlmostEqual(
            canonicalize_obb(OrientedBox(0, 0, 2, 1, 3 * math.pi / 2)), [0, 0, 2, 1, math.pi / 2]
        )

    def test_non_positive_extent(self):
        with self.assertRaises(NonPositiveExtent):
            canonicalize_obb(OrientedBox(0, 0, 0, 1, 0))
        with self.assertRaises(NonPositiveExtent):
            OrientedBox(0, 0, 1, -2, 0)

    def test_idempotent_and_area_preserving(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            box = random_box(rng)
            once = canonicalize_obb(box)
            self.assertEqual(canonicalize_obb(once), once)
            self.assertAlmostEqual(once.area, box.area, places=12)
            self.assertTrue(0.0 <= once.angle < math.pi)
            self.assertGreaterEqual(once.width, once.height)
            self.assertAlmostEqual(obb_iou(once, box), 1.0, places=9)

    def test_corners_counter_clockwise(self):
        corners = OrientedBox(1, 2, 4, 2, 0.3).corners
        signed = sum(
            corners[i][0] * corners[(i + 1) % 4][1] - corners[(i + 1) % 4][0] * corners[i][1]
            for i in range(4)
        ) / 2
        self.assertAlmostEqual(signed, 8.0, places=9)


class ObbIouTest(SimpleTestCase):
    """IoU повернутых боксов"""

    def test_identical(self):
        box = OrientedBox(3, 4, 5, 2, 0.7)
        self.assertEqual(obb_iou(box, box), 1.0)
        twin = OrientedBox(3, 4, 5, 2, 0.7 + 1e-13)
        self.assertAlmostEqual(obb_iou(box, twin), 1.0, places=9)

    def test_disjoint(self):
        self.assertEqual(obb_iou(OrientedBox(0, 0, 1, 1, 0), OrientedBox(3, 0, 1, 1, 0)), 0.0)

    def test_half_offset_squares(self):
        iou = obb_iou(OrientedBox(0, 0, 1, 1, 0), OrientedBox(0.5, 0, 1, 1, 0))
        self.assertAlmostEqual(iou, 1 / 3, places=9)

    def test_rotated_square(self):
        iou = obb_iou(OrientedBox(0, 0, 1, 1, 0), OrientedBox(0, 0, 1, 1, math.pi / 4))
        # Пересечение - правильный восьмиугольник площади 2(sqrt(2) - 1)
        inter = 2 * (math.sqrt(2) - 1)
        self.assertAlmostEqual(iou, inter / (2 - inter), places=9)
        self.assertAlmostEqual(iou, 0.7071, places=3)

    def test_symmetry(self):
        rng = np.random.default_rng(11)
        for _ in range(500):
            a, b = random_box(rng), random_box(rng)
            self.assertAlmostEqual(obb_iou(a, b), obb_iou(b, a), places=9)
            self.assertTrue(0.0 <= obb_iou(a, b) <= 1.0)

    def test_matches_monte_carlo(self):
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            a = random_box(rng, spread=1.5)
            b = random_box(rng, spread=1.5)
            estimate = monte_carlo_intersection(a, b, rng, 1_000_000 // 20)
            # Стандартная ошибка при 5e4 выборках не превышает a.area * 2.3e-3
            self.assertLess(abs(obb_intersection_area(a, b) - estimate), 5 * a.area * 2.3e-3)

    def test_monte_carlo_full_sample_count(self):
        rng = np.random.default_rng(7)
        a = OrientedBox(0, 0, 1, 1, 0)
        b = OrientedBox(0, 0, 1, 1, math.pi / 4)
        estimate = monte_carlo_intersection(a, b, rng, 1_000_000)
        self.assertLess(abs(obb_intersection_area(a, b) - estimate), 2e-3)


class MinAreaObbTest(SimpleTestCase):
    """Описанный бокс минимальной площади"""

    def test_axis_aligned_rectangle(self):
        box = min_area_obb([(0, 0), (4, 0), (4, 2), (0, 2)])
        for got, want in zip(box.to_list(), [2, 1, 4, 2, 0]):
            self.assertAlmostEqual(got, want, places=9)

    def test_rotated_unit_square(self):
        square = OrientedBox(0, 0, 1, 1, math.radians(30))
        box = min_area_obb(square.corners)
        self.assertAlmostEqual(box.area, 1.0, places=9)
        self.assertAlmostEqual(obb_iou(box, square), 1.0, places=9)

    def test_collinear_points(self):
        with self.assertRaises(DegenerateGeometry):
            min_area_obb([(0, 0), (1, 1), (2, 2)])
        with self.assertRaises(DegenerateGeometry):
            min_area_obb([(0, 0), (1, 1)])

    def test_matches_orientation_sweep(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            points = rng.normal(size=(int(rng.integers(3, 30)), 2)) * rng.uniform(1, 50, size=2)
            box = min_area_obb(points)
            self.assertLessEqual(box.area, sweep_min_area(points) * 1.005)
            for point in points:
                self.assertTrue(box.contains_point(point, slack=1e-7))

    def test_not_larger_than_axis_aligned(self):
        rng = np.random.default_rng(8)
        for _ in range(100):
            points = rng.uniform(-10, 10, size=(12, 2))
            extent = points.max(axis=0) - points.min(axis=0)
            self.assertLessEqual(min_area_obb(points).area, extent[0] * extent[1] + 1e-9)


class SegmentInsideFractionTest(SimpleTestCase):
    """Доля отрезка внутри бокса"""

    unit = OrientedBox(0.5, 0.5, 1, 1, 0)

    def test_fully_inside(self):
        self.assertEqual(segment_inside_fraction(Segment((0.2, 0.5), (0.8, 0.5)), self.unit), 1.0)

    def test_fully_outside(self):
        self.assertEqual(segment_inside_fraction(Segment((2, 2), (3, 3)), self.unit), 0.0)

    def test_half_inside(self):
        self.assertAlmostEqual(segment_inside_fraction(Segment((0, 0), (2, 0)), self.unit), 0.5, places=12)

    def test_zero_length(self):
        with self.assertRaises(ZeroLengthSegment):
            segment_inside_fraction(Segment((1, 1), (1, 1)), self.unit)

    def test_rigid_transform_invariance(self):
        rng = np.random.default_rng(17)
        for _ in range(300):
            box = random_box(rng)
            p0, p1 = rng.uniform(-5, 5, size=(2, 2))
            base = segment_inside_fraction(Segment(tuple(p0), tuple(p1)), box)
            theta = rng.uniform(0, 2 * math.pi)
            shift = rng.uniform(-100, 100, size=2)
            rot = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])

            def move(p):
                return tuple(rot @ np.asarray(p) + shift)

            moved_box = OrientedBox(*move((box.cx, box.cy)), box.width, box.height, box.angle + theta)
            moved = segment_inside_fraction(Segment(move(p0), move(p1)), moved_box)
            self.assertAlmostEqual(base, moved, delta=1e-9)


class SplineTest(SimpleTestCase):
    """Центростремительный сплайн"""

    def test_two_points_is_straight_line(self):
        samples = sample_spline([(0, 0), (10, 5)], density=1.0)
        cross = samples[:, 0] * 5 - samples[:, 1] * 10
        self.assertLess(np.abs(cross).max(), 1e-9)
        np.testing.assert_allclose(samples[0], (0, 0))
        np.testing.assert_allclose(samples[-1], (10, 5))

    def test_passes_through_control_points(self):
        rng = np.random.default_rng(21)
        for _ in range(50):
            control = rng.uniform(0, 100, size=(int(rng.integers(2, 8)), 2))
            samples = sample_spline(control, density=0.3)
            for point in control:
                self.assertLess(np.linalg.norm(samples - point, axis=1).min(), 1e-9)

    def test_circle_arc_deviation(self):
        radius = 100.0
        angles = np.deg2rad([0, 20, 40, 60])
        control = np.column_stack((radius * np.cos(angles), radius * np.sin(angles)))
        chord = np.linalg.norm(control[1] - control[0])
        samples = sample_spline(control, density=2.0)
        deviation = np.abs(np.linalg.norm(samples, axis=1) - radius).max()
        self.assertLess(deviation, chord / 20)

    def test_closed_spline_returns_to_start(self):
        square = [(0, 0), (10, 0), (10, 10), (0, 10)]
        samples = sample_spline(square, density=1.0, closed=True)
        self.assertGreater(len(samples), 4)
        Contour.from_points(samples.tolist())

    def test_too_few_points(self):
        with self.assertRaises(TooFewPoints):
            sample_spline([(1, 1)])
        with self.assertRaises(TooFewPoints):
            sample_spline([(1, 1), (1, 1)])


class EllipseFitTest(SimpleTestCase):
    """Прямая аппроксимация эллипса"""

    @staticmethod
    def ellipse_points(cx, cy, a, b, rotation, count):
        t = np.linspace(0, 2 * np.pi, count, endpoint=False)
        c, s = math.cos(rotation), math.sin(rotation)
        x, y = a * np.cos(t), b * np.sin(t)
        return np.column_stack((cx + x * c - y * s, cy + x * s + y * c))

    def test_circle(self):
        fit = fit_ellipse(self.ellipse_points(0, 0, 1, 1, 0, 8))
        self.assertAlmostEqual(fit.ellipse.semi_major, 1.0, places=9)
        self.assertAlmostEqual(fit.ellipse.semi_minor, 1.0, places=9)
        self.assertLess(fit.residual, 1e-9)

    def test_axis_aligned_ellipse(self):
        fit = fit_ellipse(self.ellipse_points(0, 0, 2, 1, 0, 12))
        ellipse = fit.ellipse
        for got, want in zip(
            (ellipse.cx, ellipse.cy, ellipse.semi_major, ellipse.semi_minor), (0, 0, 2, 1)
        ):
            self.assertAlmostEqual(got, want, delta=1e-6)
        self.assertLess(min(ellipse.rotation, math.pi - ellipse.rotation), 1e-6)

    def test_random_ellipses_recovered(self):
        rng = np.random.default_rng(99)
        for _ in range(100):
            b = rng.uniform(1, 80)
            a = b * rng.uniform(1.2, 100 / b) if b < 80 else 100.0
            rotation = rng.uniform(0, math.pi)
            cx, cy = rng.uniform(-500, 1500, size=2)
            fit = fit_ellipse(self.ellipse_points(cx, cy, a, b, rotation, 16))
            ellipse = fit.ellipse
            self.assertAlmostEqual(ellipse.semi_major / a, 1.0, delta=1e-6)
            self.assertAlmostEqual(ellipse.semi_minor / b, 1.0, delta=1e-6)
            self.assertLess(math.hypot(ellipse.cx - cx, ellipse.cy - cy) / a, 1e-6)
            diff = abs(ellipse.rotation - rotation)
            self.assertLess(min(diff, math.pi - diff), 1e-6 * math.pi)

    def test_too_few_points(self):
        with self.assertRaises(TooFewPoints):
            fit_ellipse([(0, 0), (1, 0), (0, 1), (1, 1)])

    def test_collinear_points(self):
        with self.assertRaises(NotAnEllipse):
            fit_ellipse([(i, 2 * i) for i in range(8)])


class EnvelopeTest(SimpleTestCase):
    """Огибающий бокс"""

    def test_single_box(self):
        box = OrientedBox(1, 2, 1, 3, 0.2)
        self.assertEqual(envelope_obb([box]), canonicalize_obb(box))

    def test_identical_boxes(self):
        box = OrientedBox(1, 2, 3, 1, 0.2)
        self.assertAlmostEqual(obb_iou(envelope_obb([box, box]), box), 1.0, places=9)

    def test_two_unit_squares(self):
        envelope = envelope_obb([OrientedBox(0, 0, 1, 1, 0), OrientedBox(2, 0, 1, 1, 0)])
        for got, want in zip(envelope.to_list(), [1, 0, 3, 1, 0]):
            self.assertAlmostEqual(got, want, places=9)

    def test_contains_inputs(self):
        rng = np.random.default_rng(31)
        for _ in range(50):
            boxes = [random_box(rng) for _ in range(3)]
            envelope = envelope_obb(boxes)
            for box in boxes:
                for corner in box.corners:
                    self.assertTrue(envelope.contains_point(corner, slack=1e-7))

    def test_empty(self):
        with self.assertRaises(EmptyInput):
            envelope_obb([])


class ContourTest(SimpleTestCase):
    """Контур"""

    def test_clockwise_input_is_reoriented(self):
        contour = Contour.from_points([(0, 0), (0, 1), (1, 1), (1, 0), (0, 0)])
        self.assertEqual(len(contour.vertices), 4)
        self.assertAlmostEqual(contour.area, 1.0)

    def test_self_intersection(self):
        with self.assertRaises(SelfIntersection):
            Contour(((0, 0), (2, 2), (2, 0), (0, 2), (-1, 1)))

    def test_obb_of_rectangle(self):
        contour = Contour.from_points([(0, 0), (4, 0), (4, 2), (0, 2)])
        self.assertAlmostEqual(contour.obb.area, 8.0, places=9)
