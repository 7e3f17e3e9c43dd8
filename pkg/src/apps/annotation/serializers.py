"""
Filename: serializers.py
Path: src/apps/annotation/serializers.py
Description: Схемы точечной разметки и OBB-целей
"""
from rest_framework import serializers

from apps.records.models import ComponentClass
from apps.records.serializers import (
    FrameHeaderSerializer, ObbField, RenamedFieldsMixin, SceneSerializer, _finite,
)

from .exceptions import InvalidPrimitive
from .models import PointAnnotationFrame, PointPrimitive, PrimitiveKind


class PointListField(serializers.Field):
    """Список точек [[x, y], ...]"""

    default_error_messages = {
        'invalid': 'Ожидается список точек [[x, y], ...].',
    }

    def to_internal_value(self, data):
        if not isinstance(data, (list, tuple)):
            self.fail('invalid')
        for point in data:
            if not isinstance(point, (list, tuple)) or len(point) != 2 or not _finite(point):
                self.fail('invalid')
        return tuple((float(x), float(y)) for x, y in data)

    def to_representation(self, value):
        return [[float(x), float(y)] for x, y in value]


class PointPrimitiveSerializer(serializers.Serializer):
    """Примитив: {kind, trunk_id, points}"""

    kind = serializers.ChoiceField(choices=PrimitiveKind.choices)
    trunk_id = serializers.IntegerField(min_value=0)
    points = PointListField()

    def validate(self, attrs):
        try:
            return PointPrimitive(
                kind=PrimitiveKind(attrs['kind']), points=attrs['points'], trunk_id=attrs['trunk_id'],
            )
        except InvalidPrimitive as exc:
            raise serializers.ValidationError({'points': str(exc)})


class PointAnnotationFrameSerializer(FrameHeaderSerializer):
    """Кадр точечной разметки"""

    image_size = serializers.ListField(
        child=serializers.IntegerField(min_value=1), min_length=2, max_length=2, required=False
    )
    scene = SceneSerializer(required=False)
    primitives = PointPrimitiveSerializer(many=True)

    def to_representation(self, instance):
        data = super().to_representation(instance)
        for name in ('image_size', 'scene'):
            if data.get(name) is None:
                data.pop(name, None)
        return data

    def validate(self, attrs):
        image_size = attrs.get('image_size')
        return PointAnnotationFrame(
            frame_id=attrs['frame_id'],
            timestamp_s=attrs['timestamp_s'],
            primitives=tuple(attrs['primitives']),
            image_size=tuple(image_size) if image_size else None,
            scene=attrs.get('scene'),
        )


class ObbTargetSerializer(RenamedFieldsMixin, serializers.Serializer):
    """OBB-цель обучения детектора"""

    renamed_fields = {'component': 'class'}

    trunk_id = serializers.IntegerField(min_value=0)
    component = serializers.ChoiceField(choices=ComponentClass.choices)
    obb = ObbField()

    def to_representation(self, instance):
        trunk_id, component, obb = instance
        return {'trunk_id': trunk_id, 'class': ComponentClass(component).value, 'obb': obb.to_list()}

    def validate(self, attrs):
        return attrs['trunk_id'], ComponentClass(attrs['component']), attrs['obb']


class ObbTargetFrameSerializer(FrameHeaderSerializer):
    """Кадр OBB-целей: {frame_id, timestamp_s, targets: [...]}"""

    targets = ObbTargetSerializer(many=True)

    def to_representation(self, instance):
        frame_id, timestamp_s, targets = instance
        return {
            'format_version': self.fields['format_version'].default,
            'frame_id': frame_id,
            'timestamp_s': timestamp_s,
            'targets': [ObbTargetSerializer(target).data for target in targets],
        }

    def validate(self, attrs):
        return attrs['frame_id'], attrs['timestamp_s'], tuple(attrs['targets'])
