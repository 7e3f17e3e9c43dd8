"""
Filename: ellipses.py
Path: src/apps/geometry/utils/ellipses.py
Description: Прямая МНК-аппроксимация эллипса с ограничением 4ac - b^2 = 1 (численно устойчивая схема)
"""
import math

import numpy as np

from ..exceptions import NotAnEllipse, TooFewPoints
from ..models import Ellipse, EllipseFit


def fit_conic(x, y):
    """
    Коэффициенты коники A x^2 + B xy + C y^2 + D x + E y + F = 0

    Args:
        x, y: Координаты точек (нормированные)

    Returns:
        ndarray: Вектор (A, B, C, D, E, F)
    """
    d1 = np.column_stack((x * x, x * y, y * y))
    d2 = np.column_stack((x, y, np.ones_like(x)))
    s1 = d1.T @ d1
    s2 = d1.T @ d2
    s3 = d2.T @ d2
    try:
        t = -np.linalg.solve(s3, s2.T)
    except np.linalg.LinAlgError as exc:
        raise NotAnEllipse('Вырожденная матрица рассеяния, точки коллинеарны') from exc
    m = s1 + s2 @ t
    # Умножение на обратную матрицу ограничения C1
    m = np.array([m[2] / 2.0, -m[1], m[0] / 2.0])
    eigvals, eigvecs = np.linalg.eig(m)
    eigvals, eigvecs = np.real(eigvals), np.real(eigvecs)
    cond = 4.0 * eigvecs[0] * eigvecs[2] - eigvecs[1] ** 2
    candidates = np.flatnonzero(cond > 0.0)
    if candidates.size == 0:
        raise NotAnEllipse('Ограниченная аппроксимация не дала эллипса')
    best = candidates[np.argmin(np.abs(eigvals[candidates]))]
    a1 = eigvecs[:, best]
    return np.concatenate((a1, t @ a1))


def conic_to_ellipse(conic):
    """
    Геометрические параметры эллипса из коэффициентов коники

    Returns:
        tuple: (cx, cy, semi_major, semi_minor, rotation)
    """
    a, b, c, d, e, f = conic
    den = b * b - 4.0 * a * c
    if den >= 0.0:
        raise NotAnEllipse('Коника не является эллипсом (гипербола или парабола)')
    x0 = (2.0 * c * d - b * e) / den
    y0 = (2.0 * a * e - b * d) / den
    f0 = a * x0 * x0 + b * x0 * y0 + c * y0 * y0 + d * x0 + e * y0 + f
    eigvals, eigvecs = np.linalg.eigh(np.array([[a, b / 2.0], [b / 2.0, c]]))
    squares = -f0 / eigvals
    if np.any(squares <= 0.0):
        raise NotAnEllipse('Мнимый эллипс')
    semi = np.sqrt(squares)
    major = int(np.argmax(semi))
    vx, vy = eigvecs[:, major]
    rotation = math.atan2(vy, vx) % math.pi
    if rotation >= math.pi - 1e-15:
        rotation = 0.0
    return x0, y0, float(semi[major]), float(semi[1 - major]), rotation


def sampson_residual(conic, x, y):
    """RMS расстояния Сэмпсона - первое приближение геометрической невязки"""
    a, b, c, d, e, f = conic
    value = a * x * x + b * x * y + c * y * y + d * x + e * y + f
    gx = 2.0 * a * x + b * y + d
    gy = b * x + 2.0 * c * y + e
    norm = np.hypot(gx, gy)
    norm[norm == 0.0] = np.finfo(float).eps
    return float(np.sqrt(np.mean((value / norm) ** 2)))


def fit_ellipse(points):
    """
    Аппроксимация набора точек эллипсом

    Args:
        points: Не менее пяти точек, не все на одной прямой

    Returns:
        EllipseFit: Эллипс и RMS-невязка в пикселях
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 5:
        raise TooFewPoints(f'Для эллипса нужно минимум 5 точек, получено {len(pts)}')
    mean = pts.mean(axis=0)
    scale = math.sqrt(float(np.mean(np.sum((pts - mean) ** 2, axis=1))))
    if scale == 0.0:
        raise NotAnEllipse('Все точки совпадают')
    singular = np.linalg.svd(pts - mean, compute_uv=False)
    if singular[-1] <= 1e-9 * singular[0]:
        raise NotAnEllipse('Точки лежат на одной прямой')
    x = (pts[:, 0] - mean[0]) / scale
    y = (pts[:, 1] - mean[1]) / scale

    conic = fit_conic(x, y)
    x0, y0, major, minor, rotation = conic_to_ellipse(conic)
    ellipse = Ellipse(
        cx=float(mean[0] + x0 * scale),
        cy=float(mean[1] + y0 * scale),
        semi_major=major * scale,
        semi_minor=minor * scale,
        rotation=rotation,
    )
    return EllipseFit(ellipse=ellipse, residual=sampson_residual(conic, x, y) * scale)
