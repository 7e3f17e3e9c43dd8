"""
Filename: cli.py
Path: src/apps/pipeline/cli.py
Description: Запуск подкоманд конвейера по имени с дефисами
"""
import sys

from django.core.management import get_commands, load_command_class

SUBCOMMANDS = {
    'fuse': 'детекции OOD и ISEG -> объединенные стволы',
    'track': 'детекции или стволы -> треки',
    'eval-det': 'детекции и/или стволы + разметка -> отчет mAP/P/R',
    'eval-mot': 'треки + разметка -> отчет MOTA/IDF1/IDP/IDR/mIoU_c',
    'annotate': 'точечная разметка -> разметка компонентов и OBB-цели',
    'simulate': 'параметры сцены -> разметка и псевдодетекции',
}


def usage():
    lines = ['Использование: manage.py <подкоманда> [флаги]', '', 'Подкоманды:']
    lines += [f'  {name:<10} {text}' for name, text in SUBCOMMANDS.items()]
    return '\n'.join(lines) + '\n'


def run_subcommand(argv):
    """
    Выполнение подкоманды

    Args:
        argv: [имя подкоманды, флаги...]

    Returns:
        int: 0 - успех, 1 - ошибка проверки данных, 2 - ошибка использования
    """
    if not argv or argv[0] in ('-h', '--help', 'help') or argv[0] not in SUBCOMMANDS:
        if argv and argv[0] not in ('-h', '--help', 'help'):
            sys.stderr.write(f'Неизвестная подкоманда: {argv[0]}\n')
        sys.stderr.write(usage())
        return 2
    name = argv[0].replace('-', '_')
    command = load_command_class(get_commands()[name], name)
    try:
        command.run_from_argv(['manage.py', name, *argv[1:]])
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    return 0
