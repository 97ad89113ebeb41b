"""Fast Logging for SCMAtools."""
import sys
from datetime import datetime

from scmatools.utils import get_hostname_string


class Logger(object):
    """Fast stderr logger for SCMAtools."""

    silent_level = 'SILENT'
    info_level = 'INFO'
    debug_level = 'DEBUG'

    def __init__(self, level, stream=None):
        """
        Create a new Logger.

        Parameters:
            level (str): 'SILENT', 'INFO' or 'DEBUG'
            stream (file): Destination, defaults to standard error
        """
        self.hostname_string = get_hostname_string()
        self.stream = stream
        self.level = level.upper()

        if self.level == self.debug_level:
            self.log = self._log_all
        elif self.level == self.info_level:
            self.log = self._log_info
        else:
            self.log = lambda *_: None

    def _log_all(self, level, message, *args):
        timestamp = datetime.now().strftime('%Y-%m-%d %H:%M:%S')
        message = message.format(*args)
        stream = self.stream or sys.stderr
        stream.write(
            f'{timestamp} [{self.hostname_string}] ' +
            f'[{level}] {message}\n',
        )

    def _log_info(self, level, message, *args):
        if level == self.info_level:
            self._log_all(level, message, *args)
