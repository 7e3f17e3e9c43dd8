"""
Filename: assignment.py
Path: src/apps/fusion/utils/assignment.py
Description: Линейное назначение (задача о назначениях) и отбор пар по порогу
"""
import numpy as np
from scipy import optimize


def linear_sum_assignment(cost):
    """
    Назначение минимальной стоимости размера min(m, n)

    Args:
        cost: Матрица m x n конечных стоимостей

    Returns:
        list: Пары (row, col), отсортированные по строке
    """
    cost = np.asarray(cost, dtype=float)
    if cost.size == 0:
        return []
    rows, cols = optimize.linear_sum_assignment(cost)
    return sorted(zip(rows.tolist(), cols.tolist()))


def assign_with_threshold(cost, max_cost):
    """
    Назначение с отбрасыванием пар дороже порога

    Пары выше порога заменяются на заведомо недопустимую стоимость до решения,
    чтобы они не вытесняли допустимые пары.

    Args:
        cost: Матрица m x n
        max_cost: Максимально допустимая стоимость пары

    Returns:
        tuple: (пары, несопоставленные строки, несопоставленные столбцы)
    """
    cost = np.asarray(cost, dtype=float)
    rows, cols = cost.shape if cost.ndim == 2 else (0, 0)
    if cost.size == 0:
        return [], list(range(rows)), list(range(cols))
    blocked = max_cost + 1.0 + np.abs(cost).max()
    gated = np.where(cost > max_cost, blocked, cost)
    pairs = [(r, c) for r, c in linear_sum_assignment(gated) if cost[r, c] <= max_cost]
    matched_rows = {r for r, _ in pairs}
    matched_cols = {c for _, c in pairs}
    return (
        pairs,
        [r for r in range(rows) if r not in matched_rows],
        [c for c in range(cols) if c not in matched_cols],
    )
