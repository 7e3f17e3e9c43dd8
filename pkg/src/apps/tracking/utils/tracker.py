"""
Filename: tracker.py
Path: src/apps/tracking/utils/tracker.py
Description: Двухэтапный трекер огибающих боксов стволов
"""
import logging

import numpy as np

from apps.fusion.utils.assignment import assign_with_threshold
from apps.geometry.utils.boxes import candidate_pairs, obb_iou

from ..exceptions import NonMonotonicTimestamp
from ..models import Track, TrackedFrame, TrackedTrunk, TrackStatus
from .kalman import KalmanBoxFilter

logger = logging.getLogger(__name__)


class TrunkTracker:
    """
    Трекер одной последовательности

    Этап 1: подтвержденные и потерянные треки против уверенных детекций.
    Этап 2: оставшиеся подтвержденные треки против слабых детекций.
    Предварительные треки сопоставляются с оставшимися уверенными детекциями.
    Номера треков начинаются с 1 и не переиспользуются.
    """

    def __init__(self, config):
        self.config = config
        self.kalman = KalmanBoxFilter(config)
        self.tracks = []
        self.next_id = 1
        self.last_timestamp = None

    def _elapsed_frames(self, timestamp):
        if self.last_timestamp is None:
            return 1.0
        if timestamp <= self.last_timestamp:
            raise NonMonotonicTimestamp(
                f'Метка времени {timestamp} не больше предыдущей {self.last_timestamp}'
            )
        return (timestamp - self.last_timestamp) * self.config.frame_rate

    def _cost(self, tracks, trunks, fuse_score):
        cost = np.ones((len(tracks), len(trunks)))
        predicted = [self.kalman.box(track.state) for track in tracks]
        for i, j in candidate_pairs(predicted, [trunk.envelope for trunk in trunks]):
            similarity = obb_iou(predicted[i], trunks[j].envelope)
            if fuse_score:
                similarity *= trunks[j].confidence
            cost[i, j] = 1.0 - similarity
        return cost

    def _associate(self, tracks, trunks, threshold, fuse_score=False):
        pairs, free_tracks, free_trunks = assign_with_threshold(
            self._cost(tracks, trunks, fuse_score), threshold,
        )
        for i, j in pairs:
            self._update_track(tracks[i], trunks[j])
        return [tracks[i] for i in free_tracks], [trunks[j] for j in free_trunks]

    def _update_track(self, track, trunk):
        track.state = self.kalman.update(track.state, trunk.envelope)
        track.last_trunk = trunk
        track.time_since_update = 0
        track.hits += 1
        track.updated = True
        if track.status == TrackStatus.LOST:
            track.status = TrackStatus.CONFIRMED
        elif track.status == TrackStatus.TENTATIVE and track.hits >= self.config.min_hits:
            track.status = TrackStatus.CONFIRMED

    def _spawn(self, trunk):
        status = TrackStatus.CONFIRMED if self.config.min_hits <= 1 else TrackStatus.TENTATIVE
        track = Track(
            track_id=self.next_id,
            state=self.kalman.initiate(trunk.envelope),
            last_trunk=trunk,
            status=status,
        )
        self.next_id += 1
        self.tracks.append(track)
        return track

    def step(self, trunks, timestamp):
        """
        Обработка одного кадра

        Args:
            trunks: UnifiedTrunk кадра (уверенность - максимум по компонентам)
            timestamp: Метка времени кадра в секундах, строго возрастающая

        Returns:
            list: (track_id, UnifiedTrunk) подтвержденных треков, обновленных в этом кадре
        """
        cfg = self.config
        dt = self._elapsed_frames(timestamp)
        elapsed = max(1, int(round(dt)))
        self.last_timestamp = timestamp

        for track in self.tracks:
            track.state = self.kalman.predict(track.state, dt)
            track.age += elapsed
            track.time_since_update += elapsed
            track.updated = False

        high = [t for t in trunks if t.confidence >= cfg.track_high_thresh]
        low = [t for t in trunks if cfg.track_low_thresh <= t.confidence < cfg.track_high_thresh]

        pool = [t for t in self.tracks if t.status in (TrackStatus.CONFIRMED, TrackStatus.LOST)]
        unconfirmed = [t for t in self.tracks if t.status == TrackStatus.TENTATIVE]

        remaining, high_left = self._associate(pool, high, cfg.match_thresh, cfg.fuse_score)
        second_pool = [t for t in remaining if t.status == TrackStatus.CONFIRMED]
        still_unmatched, low_left = self._associate(second_pool, low, cfg.second_match_thresh)
        lost_before = [t for t in remaining if t.status == TrackStatus.LOST]

        unconfirmed_left, high_left = self._associate(
            unconfirmed, high_left, cfg.unconfirmed_match_thresh, cfg.fuse_score,
        )
        removed = {id(t) for t in unconfirmed_left}

        for track in still_unmatched + lost_before:
            track.status = TrackStatus.LOST
            if track.time_since_update > cfg.track_buffer:
                removed.add(id(track))

        for trunk in high_left + low_left:
            if trunk.confidence >= cfg.new_track_thresh:
                self._spawn(trunk)

        if removed:
            logger.debug('Удалено треков: %d', len(removed))
        self.tracks = [t for t in self.tracks if id(t) not in removed]
        return [
            (t.track_id, t.last_trunk)
            for t in sorted(self.tracks, key=lambda t: t.track_id)
            if t.status == TrackStatus.CONFIRMED and t.updated
        ]


def track_sequence(frames, config):
    """
    Трекинг последовательности кадров объединенных стволов

    Args:
        frames: FusedFrame, упорядоченные по времени
        config: TrackerConfig (frame_step прореживает входные кадры)

    Returns:
        list: TrackedFrame для каждого обработанного кадра
    """
    tracker = TrunkTracker(config)
    output = []
    for frame in list(frames)[::config.frame_step]:
        tracks = tracker.step(list(frame.trunks), frame.timestamp_s)
        output.append(TrackedFrame(
            frame_id=frame.frame_id,
            timestamp_s=frame.timestamp_s,
            tracks=tuple(TrackedTrunk(track_id=i, trunk=t) for i, t in tracks),
        ))
    logger.info('Трекинг: %d кадров, создано треков: %d', len(output), tracker.next_id - 1)
    return output
