"""
Filename: serializers.py
Path: src/apps/records/serializers.py
Description: Схемы JSON-записей детекций, разметки и отчетов
"""
import math

from rest_framework import serializers

from apps.geometry.exceptions import GeometryError
from apps.geometry.models import Contour, OrientedBox
from apps.geometry.utils.boxes import canonicalize_obb

from .models import (
    FORMAT_VERSION, ComponentClass, Detection, DetectionFrame, GroundTruthFrame,
    GroundTruthInstance, Intensity, SceneParameters, SourceTask,
)


def _finite(values):
    return all(isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v) for v in values)


class ObbField(serializers.Field):
    """OBB в виде [cx, cy, w, h, angle_rad], приводится к канонической форме"""

    default_error_messages = {
        'invalid': 'Ожидается список из 5 конечных чисел [cx, cy, w, h, angle_rad].',
    }

    def to_internal_value(self, data):
        if not isinstance(data, (list, tuple)) or len(data) != 5 or not _finite(data):
            self.fail('invalid')
        try:
            return canonicalize_obb(OrientedBox.from_list(data))
        except GeometryError as exc:
            raise serializers.ValidationError(str(exc))

    def to_representation(self, value):
        return value.to_list()


class ContourField(serializers.Field):
    """Контур в виде [[x, y], ...]"""

    default_error_messages = {
        'invalid': 'Ожидается список точек [[x, y], ...].',
    }

    def to_internal_value(self, data):
        if not isinstance(data, (list, tuple)):
            self.fail('invalid')
        for point in data:
            if not isinstance(point, (list, tuple)) or len(point) != 2 or not _finite(point):
                self.fail('invalid')
        try:
            return Contour.from_points(data)
        except GeometryError as exc:
            raise serializers.ValidationError(str(exc))

    def to_representation(self, value):
        return value.to_list()


class RenamedFieldsMixin:
    """Переименование полей, совпадающих с ключевыми словами Python (class)"""

    renamed_fields = {}
    omit_if_none = ()

    def get_fields(self):
        fields = super().get_fields()
        return {self.renamed_fields.get(name, name): field for name, field in fields.items()}

    def to_representation(self, instance):
        data = super().to_representation(instance)
        for name in self.omit_if_none:
            if data.get(name) is None:
                data.pop(name, None)
        return data


class DetectionSerializer(RenamedFieldsMixin, serializers.Serializer):
    """Одна детекция модели"""

    renamed_fields = {'component': 'class'}

    component = serializers.ChoiceField(choices=ComponentClass.choices, source='component')
    confidence = serializers.FloatField(min_value=0.0, max_value=1.0)
    obb = ObbField(required=False)
    contour = ContourField(required=False)
    source = serializers.ChoiceField(choices=SourceTask.choices)

    omit_if_none = ('obb', 'contour')

    def validate_confidence(self, value):
        if not math.isfinite(value):
            raise serializers.ValidationError('Уверенность должна быть конечной.')
        return value

    def validate(self, attrs):
        obb, contour = attrs.get('obb'), attrs.get('contour')
        source = SourceTask(attrs['source'])
        if obb is None and contour is None:
            raise serializers.ValidationError({'obb': 'Нужен хотя бы один из obb или contour.'})
        if source == SourceTask.OOD and obb is None:
            raise serializers.ValidationError({'obb': 'Детекция OOD должна содержать obb.'})
        if source == SourceTask.ISEG and contour is None:
            raise serializers.ValidationError({'contour': 'Детекция ISEG должна содержать contour.'})
        return Detection(
            component=ComponentClass(attrs['component']),
            confidence=float(attrs['confidence']),
            source=source,
            obb=obb,
            contour=contour,
        )


class FrameHeaderSerializer(serializers.Serializer):
    """Общие поля записи кадра"""

    format_version = serializers.IntegerField(default=FORMAT_VERSION)
    frame_id = serializers.IntegerField(min_value=0)
    timestamp_s = serializers.FloatField()

    def validate_format_version(self, value):
        if value != FORMAT_VERSION:
            raise serializers.ValidationError(f'Неподдерживаемая версия формата: {value}.')
        return value

    def validate_timestamp_s(self, value):
        if not math.isfinite(value):
            raise serializers.ValidationError('Метка времени должна быть конечной.')
        return value


class DetectionFrameSerializer(FrameHeaderSerializer):
    """Кадр детекций: {frame_id, timestamp_s, detections: [...]}"""

    detections = DetectionSerializer(many=True)

    def validate(self, attrs):
        return DetectionFrame(
            frame_id=attrs['frame_id'],
            timestamp_s=attrs['timestamp_s'],
            detections=tuple(attrs['detections']),
        )


class SceneSerializer(serializers.Serializer):
    """Параметры сцены"""

    entropy = serializers.ChoiceField(choices=Intensity.choices)
    quantity = serializers.ChoiceField(choices=Intensity.choices)
    distance = serializers.ChoiceField(choices=Intensity.choices)
    irregularity = serializers.ChoiceField(choices=Intensity.choices)
    snow = serializers.BooleanField(default=False)

    def validate(self, attrs):
        return SceneParameters(
            entropy=Intensity(attrs['entropy']),
            quantity=Intensity(attrs['quantity']),
            distance=Intensity(attrs['distance']),
            irregularity=Intensity(attrs['irregularity']),
            snow=attrs['snow'],
        )


class ComponentsSerializer(serializers.Serializer):
    """Маски компонентов экземпляра (ключи - классы)"""

    side = ContourField(required=False)
    cut = ContourField(required=False)
    bound = ContourField(required=False)
    trunk = ContourField(required=False)

    def validate(self, attrs):
        if not attrs:
            raise serializers.ValidationError('Экземпляр должен содержать хотя бы один компонент.')
        return {ComponentClass(name): contour for name, contour in attrs.items()}


class InstanceSerializer(serializers.Serializer):
    """Экземпляр ствола"""

    trunk_id = serializers.IntegerField(min_value=0)
    components = ComponentsSerializer()

    def validate(self, attrs):
        return GroundTruthInstance(trunk_id=attrs['trunk_id'], components=attrs['components'])


class GroundTruthFrameSerializer(FrameHeaderSerializer):
    """Кадр разметки: {frame_id, timestamp_s, image_size?, scene?, instances: [...]}"""

    image_size = serializers.ListField(
        child=serializers.IntegerField(min_value=1), min_length=2, max_length=2, required=False
    )
    scene = SceneSerializer(required=False)
    instances = InstanceSerializer(many=True)

    def to_representation(self, instance):
        data = super().to_representation(instance)
        for name in ('image_size', 'scene'):
            if data.get(name) is None:
                data.pop(name, None)
        return data

    def validate(self, attrs):
        seen = set()
        for index, instance in enumerate(attrs['instances']):
            if instance.is_live_tree:
                continue
            for component in instance.components:
                key = (instance.trunk_id, component)
                if key in seen:
                    raise serializers.ValidationError({
                        'instances': f'[{index}] повтор пары (trunk_id={instance.trunk_id}, {component.value}).'
                    })
                seen.add(key)
        image_size = attrs.get('image_size')
        return GroundTruthFrame(
            frame_id=attrs['frame_id'],
            timestamp_s=attrs['timestamp_s'],
            instances=tuple(attrs['instances']),
            scene=attrs.get('scene'),
            image_size=tuple(image_size) if image_size else None,
        )


class ReportTableSerializer(serializers.Serializer):
    """Таблица отчета"""

    title = serializers.CharField()
    columns = serializers.ListField(child=serializers.CharField())
    rows = serializers.ListField(child=serializers.ListField())


class ReportSerializer(serializers.Serializer):
    """Отчет оценки"""

    format_version = serializers.IntegerField()
    kind = serializers.CharField()
    config = serializers.DictField()
    inputs = serializers.DictField(child=serializers.CharField())
    metrics = serializers.DictField(child=serializers.FloatField())
    undefined = serializers.ListField(child=serializers.CharField())
    tables = ReportTableSerializer(many=True)
