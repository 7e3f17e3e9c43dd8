"""
Filename: stratify.py
Path: src/apps/metrics/utils/stratify.py
Description: Пересчет метрик по слоям параметров сцены
"""
import logging

from apps.records.models import SCENE_PARAMETERS, Intensity

from ..exceptions import MissingSceneParameters
from ..models import StratifiedReport, StratumRow

logger = logging.getLogger(__name__)

SNOW_LEVELS = ('false', 'true')


def strata():
    """Пары (параметр, уровень) в порядке отчета"""
    pairs = [(parameter, level) for parameter in SCENE_PARAMETERS for level in Intensity.values]
    pairs += [('snow', level) for level in SNOW_LEVELS]
    return pairs


def level_of(scene, parameter):
    if parameter == 'snow':
        return 'true' if scene.snow else 'false'
    return Intensity(getattr(scene, parameter)).value


def stratify(items, evaluate, scene=lambda item: item.scene, trunk_count=lambda item: item.trunk_count):
    """
    Метрики по слоям: для каждого параметра кадры разбиваются по уровням

    Args:
        items: Кадры (или результаты по кадрам)
        evaluate: Функция подмножества кадров -> dict метрик
        scene: Доступ к SceneParameters элемента
        trunk_count: Число стволов элемента

    Returns:
        StratifiedReport
    """
    items = list(items)
    for item in items:
        if scene(item) is None:
            raise MissingSceneParameters(f'Кадр {getattr(item, "frame_id", "?")}: нет параметров сцены')

    rows = []
    for parameter, level in strata():
        subset = [item for item in items if level_of(scene(item), parameter) == level]
        rows.append(StratumRow(
            parameter=parameter,
            level=level,
            frames=len(subset),
            trunks=sum(trunk_count(item) for item in subset),
            metrics=evaluate(subset) if subset else {},
        ))
    logger.debug('Стратификация: %d кадров, %d слоев', len(items), len(rows))
    return StratifiedReport(rows=tuple(rows))
