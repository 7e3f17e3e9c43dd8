"""
Filename: kalman.py
Path: src/apps/tracking/utils/kalman.py
Description: Фильтр Калмана с постоянной скоростью для повернутых боксов
"""
import math

import numpy as np
from scipy import linalg

from apps.geometry.models import OrientedBox
from apps.geometry.utils.boxes import canonicalize_obb

from ..models import KalmanState

NDIM = 5
MIN_EXTENT = 1e-3
# Минимальная высота для масштабирования шумов
MIN_NOISE_SCALE = 1.0


def wrap_half_turn(delta):
    """Приведение разности углов к (-pi/2, pi/2]"""
    return math.pi / 2 - (math.pi / 2 - delta) % math.pi


class KalmanBoxFilter:
    """
    Фильтр с состоянием (cx, cy, w, h, theta, vcx, vcy, vw, vh, vtheta)

    Скорости заданы за кадр; шумы координат и размеров пропорциональны высоте бокса.
    Угол хранится без сворачивания по модулю pi.
    """

    def __init__(self, config):
        self.config = config
        self._update_mat = np.eye(NDIM, 2 * NDIM)

    def _scale(self, mean):
        return max(float(mean[3]), MIN_NOISE_SCALE)

    def initiate(self, box):
        """
        Начальное состояние по первому измерению

        Args:
            box: Канонический OrientedBox

        Returns:
            KalmanState: Среднее с нулевыми скоростями
        """
        cfg = self.config
        mean = np.r_[np.array([box.cx, box.cy, box.width, box.height, box.angle]), np.zeros(NDIM)]
        scale = self._scale(mean)
        std = np.r_[
            np.full(4, 2 * cfg.position_noise * scale), 2 * cfg.angle_noise,
            np.full(4, 10 * cfg.velocity_noise * scale), 10 * cfg.angle_velocity_noise,
        ]
        return KalmanState(mean=mean, covariance=np.diag(np.square(std)))

    def motion_matrix(self, dt):
        motion = np.eye(2 * NDIM)
        motion[:NDIM, NDIM:] = dt * np.eye(NDIM)
        return motion

    def predict(self, state, dt=1.0):
        """
        Прогноз на dt кадров вперед

        Шум процесса масштабируется числом кадров.
        """
        cfg = self.config
        scale = self._scale(state.mean)
        std = np.r_[
            np.full(4, cfg.position_noise * scale), cfg.angle_noise,
            np.full(4, cfg.velocity_noise * scale), cfg.angle_velocity_noise,
        ]
        motion = self.motion_matrix(dt)
        mean = motion @ state.mean
        covariance = motion @ state.covariance @ motion.T + np.diag(np.square(std)) * dt
        return KalmanState(mean=self._clamp(mean), covariance=(covariance + covariance.T) / 2.0)

    def measurement_noise(self, mean):
        cfg = self.config
        scale = self._scale(mean)
        std = np.r_[np.full(4, cfg.measurement_noise * scale), cfg.angle_measurement_noise]
        return np.diag(np.square(std))

    def align_measurement(self, mean, box):
        """
        Представление бокса, ближайшее к состоянию

        Бокс (w, h, theta) совпадает с (h, w, theta + pi/2); выбирается вариант
        с меньшим расхождением размеров, угол подбирается с точностью до pi.

        Returns:
            np.ndarray: Измерение (cx, cy, w, h, theta)
        """
        candidates = (
            (box.width, box.height, box.angle),
            (box.height, box.width, box.angle + math.pi / 2),
        )
        width, height, angle = min(
            candidates,
            key=lambda c: (abs(c[0] - mean[2]) + abs(c[1] - mean[3]), abs(wrap_half_turn(c[2] - mean[4]))),
        )
        return np.array([box.cx, box.cy, width, height, mean[4] + wrap_half_turn(angle - mean[4])])

    def update(self, state, box):
        """
        Коррекция по измерению

        Args:
            state: KalmanState после прогноза
            box: Канонический OrientedBox

        Returns:
            KalmanState: Апостериорное состояние
        """
        mean, covariance = state.mean, state.covariance
        measurement = self.align_measurement(mean, box)
        noise = self.measurement_noise(mean)
        projected_cov = self._update_mat @ covariance @ self._update_mat.T + noise

        factor = linalg.cho_factor(projected_cov, lower=True, check_finite=False)
        gain = linalg.cho_solve(factor, (covariance @ self._update_mat.T).T, check_finite=False).T
        innovation = measurement - self._update_mat @ mean

        new_mean = mean + gain @ innovation
        identity_minus = np.eye(2 * NDIM) - gain @ self._update_mat
        new_cov = identity_minus @ covariance @ identity_minus.T + gain @ noise @ gain.T
        return KalmanState(mean=self._clamp(new_mean), covariance=(new_cov + new_cov.T) / 2.0)

    def _clamp(self, mean):
        mean = mean.copy()
        mean[2] = max(mean[2], MIN_EXTENT)
        mean[3] = max(mean[3], MIN_EXTENT)
        return mean

    def box(self, state):
        """Канонический бокс из среднего состояния"""
        cx, cy, width, height, angle = state.mean[:NDIM]
        return canonicalize_obb(OrientedBox(
            float(cx), float(cy), max(float(width), MIN_EXTENT), max(float(height), MIN_EXTENT), float(angle),
        ))
