"""
Filename: tests.py
Path: src/apps/pipeline/tests.py
Description: Тесты подкоманд, итоговой конфигурации и сквозного конвейера
"""
import io
from contextlib import redirect_stderr, redirect_stdout

from django.conf import settings
from django.core.exceptions import ImproperlyConfigured
from django.test import SimpleTestCase, override_settings

from apps.fusion.utils.io import load_fused
from apps.records.tests import TempDirMixin
from apps.records.utils.io import load_report
from apps.tracking.models import TrackerPreset

from .cli import SUBCOMMANDS, run_subcommand
from .utils.config import load_cli_config, read_config_file


def quiet_run(argv):
    """Код возврата и stderr подкоманды"""
    stderr = io.StringIO()
    with redirect_stderr(stderr), redirect_stdout(io.StringIO()):
        code = run_subcommand(argv)
    return code, stderr.getvalue()


class SubcommandTest(TempDirMixin, SimpleTestCase):
    """Разбор подкоманд и коды возврата"""

    def test_unknown_subcommand(self):
        code, stderr = quiet_run(['merge'])
        self.assertEqual(code, 2)
        self.assertIn('merge', stderr)
        for name in SUBCOMMANDS:
            self.assertIn(name, stderr)

    def test_no_subcommand(self):
        code, stderr = quiet_run([])
        self.assertEqual(code, 2)
        self.assertIn('eval-mot', stderr)

    def test_missing_required_flag(self):
        code, _ = quiet_run(['fuse', '--output', str(self.tmp / 'fused.jsonl')])
        self.assertEqual(code, 2)

    def test_unknown_flag(self):
        code, stderr = quiet_run(['track', '--input', 'a.jsonl', '--output', 'b.jsonl', '--speed', '3'])
        self.assertEqual(code, 2)
        self.assertIn('--speed', stderr)
        self.assertIn('usage', stderr)

    def test_missing_config_file(self):
        detections = self.write_lines('dets.jsonl', [])
        code, stderr = quiet_run([
            'fuse', '--detections', str(detections), '--output', str(self.tmp / 'fused.jsonl'),
            '--config', str(self.tmp / 'absent.env'),
        ])
        self.assertEqual(code, 1)
        self.assertIn('absent.env', stderr)

    def test_unknown_config_key(self):
        detections = self.write_lines('dets.jsonl', [])
        config = self.tmp / 'run.env'
        config.write_text('CONFIDENCE_THRESH=0.5\nSPEED=3\n', encoding='utf-8')
        code, stderr = quiet_run([
            'fuse', '--detections', str(detections), '--output', str(self.tmp / 'fused.jsonl'),
            '--config', str(config),
        ])
        self.assertEqual(code, 1)
        self.assertIn('SPEED', stderr)

    def test_config_file_and_flag(self):
        detections = self.write_lines('dets.jsonl', [
            {'frame_id': 0, 'timestamp_s': 0.0, 'detections': [
                {'class': 'side', 'confidence': 0.55, 'obb': [50, 50, 40, 10, 0], 'source': 'ood'},
            ]},
        ])
        config = self.tmp / 'run.env'
        config.write_text('CONFIDENCE_THRESH=0.5\n', encoding='utf-8')
        fused = self.tmp / 'fused.jsonl'
        argv = ['fuse', '--detections', str(detections), '--output', str(fused), '--config', str(config)]
        code, stderr = quiet_run(argv)
        self.assertEqual(code, 0, stderr)
        self.assertEqual(len(load_fused(fused)[0].trunks), 1)

        code, stderr = quiet_run(argv + ['--confidence-thresh', '0.6'])
        self.assertEqual(code, 0, stderr)
        self.assertEqual(load_fused(fused)[0].trunks, ())

    def test_malformed_detections(self):
        path = self.tmp / 'dets.jsonl'
        path.write_text('{"frame_id": 0,\n', encoding='utf-8')
        code, _ = quiet_run(['fuse', '--detections', str(path), '--output', str(self.tmp / 'fused.jsonl')])
        self.assertEqual(code, 1)
        self.assertFalse((self.tmp / 'fused.jsonl').exists())


class ConfigPrecedenceTest(TempDirMixin, SimpleTestCase):
    """Порядок источников: settings < файл < флаги"""

    def config_file(self, text):
        path = self.tmp / 'run.env'
        path.write_text(text, encoding='utf-8')
        return path

    def test_settings_defaults(self):
        config = load_cli_config()
        self.assertEqual(config.fusion.confidence_threshold, 0.4)
        self.assertEqual(config.tracker.new_track_thresh, 0.6)

    @override_settings(TRUNK_FUSION={**settings.TRUNK_FUSION, 'CONFIDENCE_THRESH': 0.3})
    def test_file_and_flag_win(self):
        self.assertEqual(load_cli_config().fusion.confidence_threshold, 0.3)
        path = self.config_file('CONFIDENCE_THRESH=0.5\n')
        self.assertEqual(load_cli_config(path).fusion.confidence_threshold, 0.5)
        config = load_cli_config(path, {'CONFIDENCE_THRESH': 0.7})
        self.assertEqual(config.fusion.confidence_threshold, 0.7)
        self.assertEqual(config.to_mapping()['CONFIDENCE_THRESH'], 0.7)

    def test_unset_flag_keeps_file_value(self):
        path = self.config_file('MATCH_THRESH=0.75\n')
        self.assertEqual(load_cli_config(path, {'MATCH_THRESH': None}).tracker.match_thresh, 0.75)

    def test_preset_then_explicit_values(self):
        config = load_cli_config(None, {'TRACKER_PRESET': TrackerPreset.OPTIMIZED.value})
        self.assertEqual(config.tracker.new_track_thresh, 0.05)
        self.assertEqual(config.tracker.match_thresh, 0.9)
        path = self.config_file('TRACKER_PRESET=optimized\nNEW_TRACK_THRESH=0.2\n')
        self.assertEqual(load_cli_config(path).tracker.new_track_thresh, 0.2)

    def test_unknown_preset(self):
        with self.assertRaises(ImproperlyConfigured):
            load_cli_config(None, {'TRACKER_PRESET': 'sort'})

    def test_typed_values(self):
        values = read_config_file(self.config_file('TRACK_BUFFER=12\nFUSE_SCORE=true\nIOU_THRESH=0.6\n'))
        self.assertEqual(values, {'FUSE_SCORE': True, 'IOU_THRESH': 0.6, 'TRACK_BUFFER': 12})
        with self.assertRaises(ImproperlyConfigured):
            read_config_file(self.config_file('TRACK_BUFFER=many\n'))

    def test_out_of_range_value(self):
        with self.assertRaises(ImproperlyConfigured):
            load_cli_config(self.config_file('CONFIDENCE_THRESH=1.5\n'))


class EndToEndTest(TempDirMixin, SimpleTestCase):
    """Сквозной конвейер simulate -> fuse -> track -> eval"""

    def setUp(self):
        super().setUp()
        self.config = self.tmp / 'scene.env'
        self.config.write_text('IMAGE_WIDTH=320\nIMAGE_HEIGHT=240\n', encoding='utf-8')
        self.gt = self.tmp / 'gt.jsonl'
        self.detections = self.tmp / 'dets.jsonl'
        code, stderr = quiet_run([
            'simulate', '--config', str(self.config), '--gt', str(self.gt), '--detections', str(self.detections),
            '--seed', '5', '--frames', '3', '--trunks', '3', '--distance', 'mid',
        ])
        self.assertEqual(code, 0, stderr)

    def run_ok(self, argv):
        code, stderr = quiet_run(argv)
        self.assertEqual(code, 0, stderr)

    def test_tracking_pipeline_is_reproducible(self):
        fused, tracks = self.tmp / 'fused.jsonl', self.tmp / 'tracks.jsonl'
        self.run_ok(['fuse', '--detections', str(self.detections), '--output', str(fused)])
        self.run_ok(['track', '--input', str(fused), '--output', str(tracks)])
        reports = [self.tmp / 'mot_a.json', self.tmp / 'mot_b.json']
        for report in reports:
            self.run_ok(['eval-mot', '--gt', str(self.gt), '--tracks', str(tracks), '--output', str(report)])
        self.assertEqual(reports[0].read_bytes(), reports[1].read_bytes())

        report = load_report(reports[0])
        self.assertEqual(report['kind'], 'eval-mot')
        self.assertEqual(report['metrics']['mota'], 1.0)
        self.assertEqual(report['metrics']['idf1'], 1.0)

    def test_zero_noise_fused_detection(self):
        fused, output = self.tmp / 'fused.jsonl', self.tmp / 'det.json'
        self.run_ok(['fuse', '--detections', str(self.detections), '--output', str(fused)])
        self.run_ok([
            'eval-det', '--gt', str(self.gt), '--detections', str(self.detections), '--fused', str(fused),
            '--output', str(output),
        ])
        metrics = load_report(output)['metrics']
        self.assertAlmostEqual(metrics['fused.precision'], 1.0)
        self.assertAlmostEqual(metrics['fused.recall'], 1.0)
        self.assertEqual(sorted(load_report(output)['inputs']), ['dets.jsonl', 'fused.jsonl', 'gt.jsonl'])
