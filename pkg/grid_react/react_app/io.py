"""
Reading and writing the JSON documents exchanged by the commands and the API.

Syntax errors are reported with file, line and column; schema errors with the
offending field.
"""
import json
from pathlib import Path

from .attacks import AttackScenario, Observation
from .exceptions import InputFileError, InvalidGrid, InvalidScenario
from .grid import Grid
from .serializers import GridSerializer, ObservationSerializer, ScenarioSerializer


def read_text(path):
    try:
        return Path(path).read_text(encoding='utf-8')
    except (OSError, UnicodeDecodeError) as exc:
        raise InputFileError(str(exc), path=path) from exc


def read_json(path):
    text = read_text(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputFileError(exc.msg, path=path, line=exc.lineno, column=exc.colno) from exc


def dumps(data):
    return json.dumps(data, indent=2) + '\n'


def write_text(text, path):
    try:
        with open(path, 'w', encoding='utf-8', newline='\n') as fh:
            fh.write(text)
    except OSError as exc:
        raise InputFileError(str(exc), path=path) from exc


def write_json(data, path):
    write_text(dumps(data), path)


def error_summary(errors, prefix=''):
    """Flatten a DRF error structure into 'field: message' fragments."""
    if isinstance(errors, dict):
        parts = []
        for key, value in errors.items():
            name = key if key != 'non_field_errors' else ''
            parts.append(error_summary(value, '%s.%s' % (prefix, name) if prefix and name else prefix or name))
        return '; '.join(p for p in parts if p)
    if isinstance(errors, list):
        if all(isinstance(e, str) for e in errors):
            text = ' '.join(str(e) for e in errors)
            return '%s: %s' % (prefix, text) if prefix else text
        return '; '.join(error_summary(e, '%s[%d]' % (prefix, i)) for i, e in enumerate(errors) if e)
    return '%s: %s' % (prefix, errors) if prefix else str(errors)


def _located(path, message):
    return '%s: %s' % (path, message) if path is not None else message


def parse_grid(data, path=None):
    serializer = GridSerializer(data=data)
    if not serializer.is_valid():
        raise InvalidGrid(_located(path, error_summary(serializer.errors)))
    try:
        return Grid.from_dict(serializer.validated_data)
    except InvalidGrid as exc:
        raise InvalidGrid(_located(path, exc.detail)) from exc


def load_grid(path):
    return parse_grid(read_json(path), path)


def parse_scenario(data, path=None):
    serializer = ScenarioSerializer(data=data)
    if not serializer.is_valid():
        raise InvalidScenario(_located(path, error_summary(serializer.errors)))
    return AttackScenario.from_dict(serializer.validated_data)


def load_scenario(path):
    return parse_scenario(read_json(path), path)


def parse_observation(data, grid, path=None):
    serializer = ObservationSerializer(data=data)
    if not serializer.is_valid():
        raise InvalidScenario(_located(path, error_summary(serializer.errors)))
    try:
        return Observation.from_dict(serializer.validated_data, grid)
    except InvalidScenario as exc:
        raise InvalidScenario(_located(path, exc.detail)) from exc


def load_observation(path, grid):
    return parse_observation(read_json(path), grid, path)
