"""
Filename: simulate.py
Path: src/apps/simulate/management/commands/simulate.py
Description: Команда simulate: параметры сцены -> разметка, псевдодетекции и точечная разметка
"""
import logging

from apps.annotation.utils.io import write_point_annotations
from apps.pipeline.utils.commands import PipelineCommand
from apps.records.models import Intensity, SceneParameters
from apps.records.utils.io import write_detections, write_ground_truth

from ...models import SceneSpec
from ...utils.noise import perturb_sequence
from ...utils.sequence import annotation_frames, simulate_sequence

logger = logging.getLogger(__name__)


class Command(PipelineCommand):
    help = 'Генерация синтетической разметки и псевдодетекций'
    config_flags = ('--seed', '--frames')

    def add_command_arguments(self, parser):
        for name in ('entropy', 'quantity', 'distance', 'irregularity'):
            parser.add_argument(
                f'--{name}', choices=Intensity.values, default=Intensity.LOW.value,
                help=f'Уровень параметра сцены {name}',
            )
        parser.add_argument('--snow', action='store_true', help='Снег на сцене')
        parser.add_argument('--trunks', type=int, metavar='N', help='Число стволов (иначе по уровню quantity)')
        parser.add_argument('--frame-rate', type=float, default=30.0, help='Частота кадров')
        parser.add_argument('--gt', required=True, metavar='FILE', help='Файл разметки')
        parser.add_argument('--detections', metavar='FILE', help='Файл псевдодетекций')
        parser.add_argument('--annotations', metavar='FILE', help='Файл точечной разметки стволов')

    def run(self, config, **options):
        options_sim = config.simulation
        spec = SceneSpec(
            scene=SceneParameters(
                entropy=Intensity(options['entropy']),
                quantity=Intensity(options['quantity']),
                distance=Intensity(options['distance']),
                irregularity=Intensity(options['irregularity']),
                snow=options['snow'],
            ),
            image_size=options_sim.image_size,
            seed=options_sim.seed,
            trunk_count=options['trunks'],
        )
        scene, sequence, offsets = simulate_sequence(
            spec, options_sim.frames, options_sim.motion, options['frame_rate'],
        )
        write_ground_truth(options['gt'], sequence.frames)
        if options.get('detections'):
            write_detections(options['detections'], perturb_sequence(sequence.frames, config.noise, spec.seed))
        if options.get('annotations'):
            write_point_annotations(options['annotations'], annotation_frames(scene, sequence, offsets))
        logger.info('Сцена seed=%d: %d стволов, %d кадров', spec.seed, len(scene.trunks), len(sequence))
