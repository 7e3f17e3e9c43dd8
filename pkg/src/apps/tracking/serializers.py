"""
Filename: serializers.py
Path: src/apps/tracking/serializers.py
Description: Схема JSON-записей выхода трекера
"""
from rest_framework import serializers

from apps.fusion.serializers import UnifiedTrunkSerializer
from apps.records.serializers import FrameHeaderSerializer

from .models import TrackedFrame, TrackedTrunk


class TrackedTrunkSerializer(serializers.Serializer):
    """{track_id, trunk}"""

    track_id = serializers.IntegerField(min_value=1)
    trunk = UnifiedTrunkSerializer()

    def validate(self, attrs):
        return TrackedTrunk(track_id=attrs['track_id'], trunk=attrs['trunk'])


class TrackedFrameSerializer(FrameHeaderSerializer):
    """Кадр трекинга: {frame_id, timestamp_s, tracks: [{track_id, trunk}]}"""

    tracks = TrackedTrunkSerializer(many=True)

    def validate(self, attrs):
        ids = [t.track_id for t in attrs['tracks']]
        if len(ids) != len(set(ids)):
            raise serializers.ValidationError({'tracks': 'Номера треков в кадре должны быть уникальны.'})
        return TrackedFrame(
            frame_id=attrs['frame_id'],
            timestamp_s=attrs['timestamp_s'],
            tracks=tuple(attrs['tracks']),
        )
