"""File helpers shared by the command line tools."""

import json
from gzip import open as gzip_open

from scmatools.errors import ParseError


def open_stream(path, mode='rt', encoding='utf-8'):
    """
    Open a input or output stream from a file, accounting for gzip.

    Parameters:
        path (str): Path to file for reading or writing
        mode (str): File mode
        encoding (str): File encoding

    Returns:
        TextIOWrapper to the file
    """
    if str(path).endswith('gz'):
        return gzip_open(path, mode, encoding=encoding)
    return open(path, mode, encoding=encoding)  # noqa:WPS515


def _reject_constant(name):
    raise ParseError(f'Non-finite value {name} is not allowed.')


def read_json(path):
    """
    Parse a JSON document, refusing NaN and Infinity literals.

    Parameters:
        path (str): File to read

    Returns:
        object: Decoded document

    Raises:
        ParseError: The file is missing or is not valid JSON
    """
    try:
        with open_stream(path) as stream:
            return json.load(stream, parse_constant=_reject_constant)
    except OSError as exc:
        raise ParseError(f'Unable to read {path}: {exc}') from exc
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f'Invalid JSON in {path}: {exc}') from exc


def write_json(document, path, raw=None):
    """
    Write a JSON document with stable key order.

    Parameters:
        document (dict): JSON serializable object
        path (str): Destination file
        raw (dict): Keys whose values are already encoded JSON text
    """
    raw = raw or {}
    slots = {key: f'@{key}@' for key in raw}
    text = json.dumps({**document, **slots}, indent=2, allow_nan=False)
    for key, encoded in raw.items():
        text = text.replace(json.dumps(slots[key]), encoded, 1)
    with open_stream(path, 'wt') as stream:
        stream.write(text)
        stream.write('\n')
