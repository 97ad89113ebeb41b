"""Tests for logging, file helpers and result loading."""

import io

import pytest

from scmatools import file_utils, utils
from scmatools.errors import ParseError
from scmatools.logger import Logger


class TestLogger:
    """Leveled stderr logging."""

    def test_info_hides_debug(self):
        stream = io.StringIO()
        log = Logger(Logger.info_level, stream=stream).log
        log(Logger.info_level, 'point {} done', 3)
        log(Logger.debug_level, 'batch {}', 1)
        lines = stream.getvalue().splitlines()
        assert len(lines) == 1
        assert lines[0].endswith('[INFO] point 3 done')

    def test_debug_shows_everything(self):
        stream = io.StringIO()
        log = Logger('debug', stream=stream).log
        log(Logger.info_level, 'a')
        log(Logger.debug_level, 'b')
        assert len(stream.getvalue().splitlines()) == 2

    def test_silent(self):
        stream = io.StringIO()
        Logger(Logger.silent_level, stream=stream).log(Logger.info_level, 'x')
        assert stream.getvalue() == ''


class TestFiles:
    """JSON and gzip helpers."""

    def test_json_round_trip(self, tmp_path):
        path = str(tmp_path / 'doc.json')
        file_utils.write_json({'a': [1, 2.5]}, path)
        assert file_utils.read_json(path) == {'a': [1, 2.5]}

    def test_gzip_stream(self, tmp_path):
        path = str(tmp_path / 'doc.json.gz')
        file_utils.write_json({'b': 1}, path)
        assert file_utils.read_json(path) == {'b': 1}

    def test_write_rejects_nan(self, tmp_path):
        with pytest.raises(ValueError):
            file_utils.write_json({'a': float('nan')}, str(tmp_path / 'x.json'))

    def test_invalid_json(self, tmp_path):
        path = tmp_path / 'bad.json'
        path.write_text('{"a": ')
        with pytest.raises(ParseError):
            file_utils.read_json(str(path))


class TestUtils:
    """Result files."""

    def test_load_results_requires_columns(self, tmp_path):
        path = tmp_path / 'r.csv'
        path.write_text('snr_db,trials\n0,10\n')
        with pytest.raises(ParseError):
            utils.load_results(str(path))

    def test_load_results_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            utils.load_results(str(tmp_path / 'absent.csv'))

    def test_hostname_string(self):
        assert len(utils.get_hostname_string().split('|')) == 3
