"""Structural invariant checks for constellations."""

import numpy as np

from scmatools.errors import InvariantViolation
from scmatools.logger import Logger

DISTINCT_TOLERANCE = 1e-9
ENERGY_TOLERANCE = 1e-12


class ConstellationChecks(object):
    """Named invariant checks run against a candidate point set."""

    def __init__(self, log_level=Logger.silent_level):
        """
        Create a ConstellationChecks object.

        Parameters:
            log_level (str): Logger level for discarded candidates
        """
        self.log = Logger(log_level).log
        self.check_list = [
            self.check_shape,
            self.check_finite,
            self.check_power_of_two,
            self.check_label_permutation,
            self.check_distinct_points,
        ]

    def add(self, function):
        """
        Add a check.

        Parameters:
            function (ConstellationChecks method): The check to perform
        """
        if function not in self.check_list:
            self.check_list.append(function)

    def check(self, points, labels):
        """
        Run every check, raising on the first failure.

        Parameters:
            points (numpy.ndarray): M x dv complex coordinates
            labels (numpy.ndarray): Label of each row of points

        Raises:
            InvariantViolation: Names the failed check
        """
        for function in self.check_list:
            if not function(points=points, labels=labels):
                name = function.__name__.removeprefix('check_')
                raise InvariantViolation(name, self._messages[name])

    _messages = {
        'shape': 'points must be an M x dv array with one label per point',
        'finite': 'all coordinates must be finite',
        'power_of_two': 'M must be a power of two',
        'label_permutation': 'labels must be a permutation of 0..M-1',
        'distinct_points': 'no two points may coincide',
        'unit_energy': 'average symbol energy must be one',
    }

    def check_shape(self, points, labels):
        """
        Check array layout.

        Parameters:
            points (numpy.ndarray): Candidate points
            labels (numpy.ndarray): Candidate labels

        Returns:
            (bool): True if points is M x dv with dv >= 1 and M labels
        """
        if points.ndim != 2 or points.shape[1] < 1 or not len(points):
            self.log(Logger.debug_level, 'DISCARD shape={}', points.shape)
            return False
        if len(labels) != len(points):
            self.log(
                Logger.debug_level,
                'DISCARD labels={} points={}',
                len(labels),
                len(points),
            )
            return False
        return True

    def check_finite(self, points, labels):
        """
        Check that every coordinate is finite.

        Parameters:
            points (numpy.ndarray): Candidate points
            labels (numpy.ndarray): Candidate labels

        Returns:
            (bool): True if no NaN or Inf is present
        """
        if not np.all(np.isfinite(points)):
            self.log(Logger.debug_level, 'DISCARD non-finite coordinates')
            return False
        return True

    def check_power_of_two(self, points, labels):
        """
        Check the point count.

        Parameters:
            points (numpy.ndarray): Candidate points
            labels (numpy.ndarray): Candidate labels

        Returns:
            (bool): True if M is a power of two
        """
        size = len(points)
        if size & (size - 1):
            self.log(Logger.debug_level, 'DISCARD M={}', size)
            return False
        return True

    def check_label_permutation(self, points, labels):
        """
        Check label bijectivity.

        Parameters:
            points (numpy.ndarray): Candidate points
            labels (numpy.ndarray): Candidate labels

        Returns:
            (bool): True if labels enumerate 0..M-1 exactly once
        """
        expected = np.arange(len(points))
        if not np.array_equal(np.sort(labels), expected):
            self.log(Logger.debug_level, 'DISCARD labels={}', list(labels))
            return False
        return True

    def check_distinct_points(self, points, labels):
        """
        Check that points are pairwise distinct after normalization.

        Parameters:
            points (numpy.ndarray): Candidate points
            labels (numpy.ndarray): Candidate labels

        Returns:
            (bool): True if every pair is farther apart than 1e-9
        """
        if len(points) < 2:
            return True
        energy = np.mean(np.sum(np.abs(points) ** 2, axis=1))
        if energy == 0:
            self.log(Logger.debug_level, 'DISCARD all points at origin')
            return False
        scaled = points / np.sqrt(energy)
        diff = scaled[:, None, :] - scaled[None, :, :]
        dist = np.sqrt(np.sum(np.abs(diff) ** 2, axis=2))
        upper = dist[np.triu_indices(len(points), 1)]
        if upper.min() <= DISTINCT_TOLERANCE:
            self.log(Logger.debug_level, 'DISCARD coincident points')
            return False
        return True

    def check_unit_energy(self, points, labels):
        """
        Check that the average symbol energy is one.

        Parameters:
            points (numpy.ndarray): Candidate points
            labels (numpy.ndarray): Candidate labels

        Returns:
            (bool): True if |Es - 1| <= 1e-12
        """
        energy = np.mean(np.sum(np.abs(points) ** 2, axis=1))
        if abs(energy - 1) > ENERGY_TOLERANCE:
            self.log(Logger.debug_level, 'DISCARD Es={}', energy)
            return False
        return True
