"""SNR grids for Monte Carlo sweeps."""

import re

import numpy as np

from scmatools.errors import ConfigError, GridMismatch

MATCH_TOLERANCE = 1e-9


class SnrGrid(object):
    """Strictly increasing list of SNR points in dB."""

    def __init__(self, **kwargs):
        """
        Create a new SNR grid.

        Parameters:
            **kwargs (dict):
                string (str): "start:stop:step" with an inclusive stop
                OR
                values (list): SNR points in dB

        Raises:
            ConfigError: The grid is malformed or not strictly increasing
        """
        if 'string' in kwargs:
            values = self._parse_string(kwargs['string'])
        else:
            values = kwargs.get('values', [])
        try:
            values = np.array(values, dtype=float).reshape(-1)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f'SNR values must be numbers: {exc}') from exc
        if not np.all(np.isfinite(values)):
            raise ConfigError('SNR values must be finite.')
        if np.any(np.diff(values) <= 0):
            raise ConfigError('SNR grid must be strictly increasing.')
        self.values = values

    def __str__(self):
        """
        Put the grid into list form.

        Returns:
            (str): comma separated dB values
        """
        return ','.join(f'{value:g}' for value in self.values)

    def __len__(self):
        """
        Number of points.

        Returns:
            int
        """
        return len(self.values)

    def __iter__(self):
        """
        Iterate over the points.

        Returns:
            iterator of float
        """
        return (float(value) for value in self.values)

    def enumerate(self):
        """
        Pair every point with its index.

        Returns:
            list of (int, float)
        """
        return list(enumerate(self))

    def index(self, snr_db):
        """
        Position of a point on the grid.

        Parameters:
            snr_db (float): Point to look up

        Returns:
            int

        Raises:
            GridMismatch: The point is not on the grid
        """
        matches = np.flatnonzero(np.abs(self.values - snr_db) <= MATCH_TOLERANCE)
        if not len(matches):
            raise GridMismatch(f'{snr_db} dB is not on the grid {self}.')
        return int(matches[0])

    def window(self, low=None, high=None):
        """
        Indices of the points inside a closed dB range.

        Parameters:
            low (float): Lower edge, unbounded if None
            high (float): Upper edge, unbounded if None

        Returns:
            numpy.ndarray of int
        """
        left = np.ones(len(self.values), dtype=bool)
        right = np.ones(len(self.values), dtype=bool)
        if low is not None:
            left = self.values >= low - MATCH_TOLERANCE
        if high is not None:
            right = self.values <= high + MATCH_TOLERANCE
        return np.flatnonzero(left & right)

    def top(self, span_db):
        """
        Indices of the highest span_db decibels of the grid.

        Parameters:
            span_db (float): Width of the window

        Returns:
            numpy.ndarray of int
        """
        if not len(self.values):
            return np.array([], dtype=int)
        return self.window(low=self.values[-1] - span_db)

    def _parse_string(self, grid_str):
        fields = re.split(':', re.sub(r'\s', '', grid_str))
        if len(fields) != 3:
            raise ConfigError(f'Unrecognized format: {grid_str}.')
        try:
            start, stop, step = (float(field) for field in fields)
        except ValueError as exc:
            raise ConfigError(f'Unrecognized format: {grid_str}.') from exc
        if step <= 0 or stop < start:
            raise ConfigError(f'Grid {grid_str} needs start <= stop and step > 0.')
        count = int(np.floor((stop - start) / step + MATCH_TOLERANCE)) + 1
        return np.round(start + step * np.arange(count), 10)
