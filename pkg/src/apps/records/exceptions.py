"""
Filename: exceptions.py
Path: src/apps/records/exceptions.py
Description: Ошибки чтения, проверки и записи файлов
"""


class RecordError(ValueError):
    """Базовая ошибка формата записей"""

    def __init__(self, message, path=None, line=None, field=None):
        self.path = path
        self.line = line
        self.field = field
        location = ''
        if path is not None:
            location = f'{path}'
            if line is not None:
                location += f':{line}'
            location += ': '
        if field:
            message = f'{field}: {message}'
        super().__init__(f'{location}{message}')


class ParseError(RecordError):
    """Синтаксически некорректная строка"""


class SchemaError(RecordError):
    """Запись не соответствует схеме или инвариантам"""


class IoError(OSError):
    """Ошибка ввода-вывода с указанием пути"""

    def __init__(self, path, reason):
        self.path = path
        super().__init__(f'{path}: {reason}')
