"""
Filename: io.py
Path: src/apps/records/utils/io.py
Description: Чтение и запись JSON-lines файлов, отчетов и контрольных сумм
"""
import hashlib
import json
import logging
from pathlib import Path

from rest_framework.exceptions import ErrorDetail

from ..exceptions import IoError, ParseError, SchemaError
from ..models import FORMAT_VERSION, Sequence
from ..serializers import DetectionFrameSerializer, GroundTruthFrameSerializer, ReportSerializer

logger = logging.getLogger(__name__)


def first_error(errors, prefix=''):
    """
    Первая ошибка DRF в виде (путь поля, сообщение)

    Args:
        errors: serializer.errors (вложенные dict/list из ErrorDetail)
        prefix: Префикс пути

    Returns:
        tuple: ('detections[0].confidence', 'сообщение')
    """
    if isinstance(errors, dict):
        for name, value in errors.items():
            if name == 'non_field_errors':
                path = prefix
            else:
                path = f'{prefix}.{name}' if prefix else str(name)
            found = first_error(value, path)
            if found:
                return found
    elif isinstance(errors, list):
        if errors and all(isinstance(e, (ErrorDetail, str)) for e in errors):
            return prefix, str(errors[0])
        for index, value in enumerate(errors):
            found = first_error(value, f'{prefix}[{index}]')
            if found:
                return found
    elif isinstance(errors, (ErrorDetail, str)):
        return prefix, str(errors)
    return None


def dumps(data):
    return json.dumps(data, ensure_ascii=False, separators=(',', ':'))


def read_records(path, serializer_class):
    """
    Чтение JSON-lines файла с проверкой каждой строки схемой

    Args:
        path: Путь к файлу
        serializer_class: Класс сериализатора, validate() которого возвращает доменный объект

    Returns:
        list: Доменные объекты в порядке строк
    """
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as exc:
        raise IoError(path, exc.strerror or str(exc)) from exc

    items = []
    for number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            payload = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, path=path, line=number, field=f'column {exc.colno}') from exc
        if not isinstance(payload, dict):
            raise ParseError('Строка должна быть JSON-объектом', path=path, line=number)
        serializer = serializer_class(data=payload)
        if not serializer.is_valid():
            field, message = first_error(serializer.errors) or ('', 'некорректная запись')
            raise SchemaError(message, path=path, line=number, field=field)
        items.append(serializer.validated_data)
    logger.debug('Прочитано %d записей из %s', len(items), path)
    return items


def write_records(path, items, serializer_class):
    """Запись доменных объектов в JSON-lines, по одному объекту на строку"""
    path = Path(path)
    lines = [dumps(serializer_class(item).data) for item in items]
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(''.join(f'{line}\n' for line in lines), encoding='utf-8')
    except OSError as exc:
        raise IoError(path, exc.strerror or str(exc)) from exc
    logger.debug('Записано %d записей в %s', len(lines), path)
    return path


def order_frames(frames, path):
    """Сортировка кадров по времени с проверкой строгого возрастания и уникальности frame_id"""
    frames = sorted(frames, key=lambda f: (f.timestamp_s, f.frame_id))
    ids = set()
    for previous, current in zip([None] + frames[:-1], frames):
        if current.frame_id in ids:
            raise SchemaError('повтор frame_id', path=path, field=f'frame_id={current.frame_id}')
        ids.add(current.frame_id)
        if previous is not None and current.timestamp_s <= previous.timestamp_s:
            raise SchemaError(
                'метки времени должны строго возрастать', path=path,
                field=f'timestamp_s={current.timestamp_s}',
            )
    return frames


def estimate_frame_rate(frames):
    if len(frames) < 2:
        return None
    span = frames[-1].timestamp_s - frames[0].timestamp_s
    return (len(frames) - 1) / span if span > 0 else None


def load_detections(path):
    """
    Загрузка файла детекций

    Args:
        path: Путь к JSON-lines файлу детекций

    Returns:
        list: DetectionFrame, упорядоченные по времени
    """
    return order_frames(read_records(path, DetectionFrameSerializer), path)


def write_detections(path, frames):
    return write_records(path, frames, DetectionFrameSerializer)


def load_ground_truth(path, check_quantity=False):
    """
    Загрузка файла разметки

    Args:
        path: Путь к JSON-lines файлу разметки
        check_quantity: Проверять согласованность уровня quantity с числом стволов

    Returns:
        Sequence: Кадры разметки
    """
    frames = order_frames(read_records(path, GroundTruthFrameSerializer), path)
    if check_quantity:
        for frame in frames:
            if frame.scene is not None and not frame.scene.quantity_matches(frame.trunk_count):
                raise SchemaError(
                    f'уровень {frame.scene.quantity.value} не согласован с числом стволов {frame.trunk_count}',
                    path=path, field=f'frame_id={frame.frame_id}.scene.quantity',
                )
    return Sequence(frames=tuple(frames), frame_rate=estimate_frame_rate(frames))


def write_ground_truth(path, frames):
    return write_records(path, frames, GroundTruthFrameSerializer)


def file_digest(path):
    """SHA-256 содержимого файла"""
    digest = hashlib.sha256()
    try:
        with open(path, 'rb') as handle:
            for chunk in iter(lambda: handle.read(1 << 16), b''):
                digest.update(chunk)
    except OSError as exc:
        raise IoError(path, exc.strerror or str(exc)) from exc
    return digest.hexdigest()


def summary_table(report):
    """
    Текстовая сводка отчета

    Args:
        report: Словарь отчета

    Returns:
        str: Таблицы метрик, выровненные по колонкам
    """
    blocks = [format_table(
        f'{report["kind"]}: метрики',
        ['metric', 'value'],
        [[name, value] for name, value in report['metrics'].items()],
    )]
    if report['undefined']:
        blocks.append('undefined: ' + ', '.join(report['undefined']))
    for table in report['tables']:
        blocks.append(format_table(table['title'], table['columns'], table['rows']))
    return '\n\n'.join(blocks) + '\n'


def _cell(value):
    if isinstance(value, float):
        return f'{value:.4f}'
    return str(value)


def format_table(title, columns, rows):
    cells = [[str(c) for c in columns]] + [[_cell(v) for v in row] for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(columns))]
    lines = [title, '  '.join(c.ljust(w) for c, w in zip(cells[0], widths)).rstrip()]
    lines.append('  '.join('-' * w for w in widths))
    for row in cells[1:]:
        lines.append('  '.join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return '\n'.join(lines)


def summary_path(path):
    path = Path(path)
    return path.with_name(f'{path.stem}.txt' if path.suffix != '.txt' else f'{path.stem}.summary.txt')


def write_report(report, path):
    """
    Запись отчета: JSON-документ и текстовая сводка рядом с ним

    Args:
        report: Словарь отчета (kind, config, inputs, metrics, undefined, tables)
        path: Путь к JSON-файлу

    Returns:
        tuple: (путь JSON, путь сводки)
    """
    path = Path(path)
    document = {
        'format_version': FORMAT_VERSION,
        'kind': report['kind'],
        'config': report.get('config', {}),
        'inputs': report.get('inputs', {}),
        'metrics': report.get('metrics', {}),
        'undefined': list(report.get('undefined', [])),
        'tables': list(report.get('tables', [])),
    }
    text = json.dumps(document, ensure_ascii=False, indent=2) + '\n'
    summary = summary_path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding='utf-8')
        summary.write_text(summary_table(document), encoding='utf-8')
    except OSError as exc:
        raise IoError(path, exc.strerror or str(exc)) from exc
    logger.info('Отчет %s записан в %s', document['kind'], path)
    return path, summary


def load_report(path):
    """Чтение отчета с проверкой схемы"""
    path = Path(path)
    try:
        document = json.loads(path.read_text(encoding='utf-8'))
    except OSError as exc:
        raise IoError(path, exc.strerror or str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, path=path, line=exc.lineno) from exc
    serializer = ReportSerializer(data=document)
    if not serializer.is_valid():
        field, message = first_error(serializer.errors) or ('', 'некорректный отчет')
        raise SchemaError(message, path=path, field=field)
    return document
