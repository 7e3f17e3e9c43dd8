"""
Filename: serializers.py
Path: src/apps/fusion/serializers.py
Description: Схемы JSON-записей объединенных стволов
"""
from rest_framework import serializers

from apps.records.models import ComponentClass
from apps.records.serializers import ContourField, FrameHeaderSerializer, ObbField, RenamedFieldsMixin, _finite

from .models import ComponentInstance, FusedFrame, UnifiedTrunk


class PointField(serializers.Field):
    """Точка [x, y]"""

    default_error_messages = {
        'invalid': 'Ожидается точка [x, y] из конечных чисел.',
    }

    def to_internal_value(self, data):
        if not isinstance(data, (list, tuple)) or len(data) != 2 or not _finite(data):
            self.fail('invalid')
        return (float(data[0]), float(data[1]))

    def to_representation(self, value):
        return [value[0], value[1]]


class ComponentInstanceSerializer(RenamedFieldsMixin, serializers.Serializer):
    """Компонент ствола"""

    renamed_fields = {'component': 'class'}
    omit_if_none = ('contour',)

    component = serializers.ChoiceField(choices=ComponentClass.choices, source='component')
    confidence = serializers.FloatField(min_value=0.0, max_value=1.0)
    obb = ObbField()
    contour = ContourField(required=False)
    task_matched = serializers.BooleanField(default=False)

    def validate(self, attrs):
        return ComponentInstance(
            component=ComponentClass(attrs['component']),
            obb=attrs['obb'],
            contour=attrs.get('contour'),
            confidence=float(attrs['confidence']),
            task_matched=attrs['task_matched'],
        )


class UnifiedTrunkSerializer(serializers.Serializer):
    """Объединенный ствол: {side?, cut?, bound?, envelope, endpoints, cut_center?}"""

    side = ComponentInstanceSerializer(required=False)
    cut = ComponentInstanceSerializer(required=False)
    bound = ComponentInstanceSerializer(required=False)
    envelope = ObbField()
    endpoints = serializers.ListField(child=PointField(), min_length=2, max_length=2)
    cut_center = PointField(required=False)

    def to_representation(self, instance):
        data = super().to_representation(instance)
        for name in ('side', 'cut', 'bound', 'cut_center'):
            if data.get(name) is None:
                data.pop(name, None)
        return data

    def validate(self, attrs):
        for name in ('side', 'cut', 'bound'):
            instance = attrs.get(name)
            if instance is not None and instance.component != name:
                raise serializers.ValidationError({name: f'Ожидается компонент класса {name}.'})
        if not any(attrs.get(name) for name in ('side', 'cut', 'bound')):
            raise serializers.ValidationError('Ствол должен содержать хотя бы один компонент.')
        return UnifiedTrunk(
            envelope=attrs['envelope'],
            endpoints=tuple(attrs['endpoints']),
            side=attrs.get('side'),
            cut=attrs.get('cut'),
            bound=attrs.get('bound'),
            cut_center=attrs.get('cut_center'),
        )


class TrunkEntrySerializer(serializers.Serializer):
    """Обертка {trunk: {...}}"""

    trunk = UnifiedTrunkSerializer()

    def to_representation(self, instance):
        return {'trunk': UnifiedTrunkSerializer(instance).data}

    def validate(self, attrs):
        return attrs['trunk']


class FusedFrameSerializer(FrameHeaderSerializer):
    """Кадр объединенных стволов: {frame_id, timestamp_s, trunks: [{trunk: {...}}]}"""

    trunks = TrunkEntrySerializer(many=True)

    def validate(self, attrs):
        return FusedFrame(
            frame_id=attrs['frame_id'],
            timestamp_s=attrs['timestamp_s'],
            trunks=tuple(attrs['trunks']),
        )
