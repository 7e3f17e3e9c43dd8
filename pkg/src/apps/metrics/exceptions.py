"""
Filename: exceptions.py
Path: src/apps/metrics/exceptions.py
Description: Исключения расчета метрик
"""


class MetricsError(ValueError):
    """Базовая ошибка метрик"""


class EmptyInstances(MetricsError):
    """Оба экземпляра не содержат компонентов"""


class FrameMismatch(MetricsError):
    """Кадры предсказаний не согласованы с кадрами разметки"""


class MissingSceneParameters(MetricsError):
    """У кадра нет параметров сцены для стратификации"""
