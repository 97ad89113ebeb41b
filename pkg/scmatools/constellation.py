"""Multidimensional SCMA constellations with bit labels."""

import os
from math import log2

import numpy as np

from scmatools.checks import ENERGY_TOLERANCE, ConstellationChecks
from scmatools.errors import (
    DimensionMismatch,
    NotUnitary,
    ParseError,
    UnknownName,
    UnsupportedSize,
    ZeroEnergy,
)
from scmatools.file_utils import read_json, write_json

data_dir = os.path.join(os.path.dirname(__file__), 'data')

UNITARY_TOLERANCE = 1e-9
COORDINATE_DIGITS = 17

_file_keys = ('name', 'M', 'dv', 'labels', 'points', 'normalized')


class MultiDimConstellation(object):
    """M labeled points in dv complex dimensions."""

    def __init__(self, name, points, labels=None, checks=None):
        """
        Create a new constellation.

        Parameters:
            name (str): Display name
            points (array_like): M x dv complex coordinates
            labels (array_like): Integer label of each row of points. Rows
                are taken to be in label order when omitted.
            checks (ConstellationChecks): Invariant checks to enforce

        Raises:
            InvariantViolation: A structural invariant does not hold
        """
        points = np.array(points, dtype=complex)
        if labels is None:
            labels = np.arange(len(points))
        labels = np.asarray(labels, dtype=int)
        if checks is None:
            checks = ConstellationChecks()
        checks.check(points, labels)

        ordered = np.empty_like(points)
        ordered[labels] = points
        ordered.setflags(write=False)
        self.name = name
        self._points = ordered

    def __repr__(self):
        """
        Short description of the constellation.

        Returns:
            str
        """
        return f'MultiDimConstellation({self.name!r}, M={self.M}, dv={self.dv})'

    def __len__(self):
        """
        Number of points.

        Returns:
            int
        """
        return self.M

    @property
    def points(self):
        """Read-only M x dv array; row m is the point labeled m."""
        return self._points

    @property
    def M(self):  # noqa:N802
        """Number of points."""
        return self._points.shape[0]

    @property
    def dv(self):
        """Number of complex dimensions."""
        return self._points.shape[1]

    @property
    def bits_per_symbol(self):
        """Label length log2(M)."""
        return int(log2(self.M))

    @property
    def labels(self):
        """Labels in row order of `points`."""
        return np.arange(self.M)

    def point(self, label):
        """
        Coordinates of a labeled point.

        Parameters:
            label (int): Point label

        Returns:
            numpy.ndarray of dv complex values
        """
        return self._points[label]

    def with_points(self, points, name=None):
        """
        Build a constellation with the same labels and new coordinates.

        Parameters:
            points (array_like): M x dv coordinates in label order
            name (str): New name, defaults to this one

        Returns:
            MultiDimConstellation
        """
        return MultiDimConstellation(name or self.name, points)


def bit_table(bits_per_symbol):
    """
    Big-endian binary expansion of every label.

    Parameters:
        bits_per_symbol (int): Label length

    Returns:
        numpy.ndarray of shape (2**bits_per_symbol, bits_per_symbol)
    """
    labels = np.arange(2 ** bits_per_symbol)[:, None]
    shifts = np.arange(bits_per_symbol - 1, -1, -1)[None, :]
    return (labels >> shifts) & 1


def pam_gray(bits):
    """
    Gray-coded PAM amplitude of a bit sequence.

    Parameters:
        bits (sequence): Bits, most significant first

    Returns:
        int: One of the odd integers in [-(2**n - 1), 2**n - 1]
    """
    if len(bits) > 1:
        return (1 - 2 * bits[0]) * (2 ** len(bits[1:]) - pam_gray(bits[1:]))
    return 1 - 2 * bits[0]


def average_energy(c):
    """
    Average symbol energy.

    Parameters:
        c (MultiDimConstellation): Constellation

    Returns:
        float: Mean squared norm over all dv complex components
    """
    return float(np.mean(np.sum(np.abs(c.points) ** 2, axis=1)))


def normalize_energy(c):
    """
    Scale a constellation to unit average energy.

    Parameters:
        c (MultiDimConstellation): Constellation

    Returns:
        MultiDimConstellation

    Raises:
        ZeroEnergy: All points sit at the origin
    """
    energy = average_energy(c)
    if energy == 0:
        raise ZeroEnergy(f'{c.name} has zero average energy.')
    return c.with_points(c.points / np.sqrt(energy))


def _square_bits(size):
    if size < 4 or size & (size - 1):
        raise UnsupportedSize(f'M={size} is not a square QAM size.')
    bits = int(log2(size))
    if bits % 2:
        raise UnsupportedSize(f'M={size} is not a square QAM size.')
    return bits


def _check_dims(dv):
    if dv < 1:
        raise UnsupportedSize(f'dv={dv} must be at least one.')


def generate_lds(M, dv):  # noqa:N803
    """
    Repeat a Gray square QAM in every complex dimension.

    Label bits alternate between the in-phase and quadrature PAM.

    Parameters:
        M (int): Point count, a power of four
        dv (int): Complex dimensions

    Returns:
        MultiDimConstellation named "M-LDS"

    Raises:
        UnsupportedSize: M is not a square QAM size or dv < 1
    """
    _check_dims(dv)
    bits = bit_table(_square_bits(M))
    qam = np.array([
        pam_gray(row[0::2]) + 1j * pam_gray(row[1::2]) for row in bits
    ])
    points = np.repeat(qam[:, None], dv, axis=1)
    return normalize_energy(MultiDimConstellation(f'{M}-LDS', points))


def generate_hypercube(M, dv):  # noqa:N803
    """
    Cartesian product of dv Gray QPSK constellations.

    The first two label bits select the QPSK point of dimension one, the
    next two dimension two, and so on.

    Parameters:
        M (int): Point count, must equal 4**dv
        dv (int): Complex dimensions

    Returns:
        MultiDimConstellation named "MHQAM"

    Raises:
        UnsupportedSize: M != 4**dv
    """
    _check_dims(dv)
    if M != 4 ** dv:
        raise UnsupportedSize(f'M={M} is not 4**dv for dv={dv}.')
    bits = bit_table(2 * dv)
    points = (1 - 2 * bits[:, 0::2]) + 1j * (1 - 2 * bits[:, 1::2])
    return normalize_energy(MultiDimConstellation(f'{M}HQAM', points))


def _t4qam():
    points = np.array([(3, 1), (1, -3), (-1, 3), (-3, -1)]) / np.sqrt(10)
    return normalize_energy(
        MultiDimConstellation('T4QAM', points, labels=[0b00, 0b10, 0b01, 0b11]),
    )


def _lqam4():
    half = np.sqrt(2) / 2
    bits = bit_table(2)
    points = np.stack([
        (2 * bits[:, 0] - 1) * half,
        1j * (2 * bits[:, 1] - 1) * half,
    ], axis=1)
    return normalize_energy(MultiDimConstellation('4LQAM', points))


def _cqam4():
    points = [(1, 0), (0, 1j), (0, -1j), (-1, 0)]
    return normalize_energy(MultiDimConstellation('4CQAM', points))


_builtins = {
    'T4QAM': _t4qam,
    '4LQAM': _lqam4,
    '4CQAM': _cqam4,
    '4-LDS': lambda: generate_lds(4, 2),
    '16-LDS': lambda: generate_lds(16, 2),
    '16HQAM': lambda: generate_hypercube(16, 2),
}

builtin_names = tuple(_builtins)


def builtin(name):
    """
    Fully determined catalog constellation.

    Parameters:
        name (str): One of `builtin_names` (case-insensitive)

    Returns:
        MultiDimConstellation

    Raises:
        UnknownName: No builtin has this name
    """
    factory = _builtins.get(name.upper())
    if factory is None:
        raise UnknownName(f'Unknown builtin constellation: {name}.')
    return factory()


def _is_int(number):
    return isinstance(number, int) and not isinstance(number, bool)


def _parse_document(doc, path):
    if not isinstance(doc, dict):
        raise ParseError(f'{path}: expected a JSON object.')
    missing = [key for key in _file_keys if key not in doc]
    if missing:
        raise ParseError(f"{path}: missing keys {', '.join(missing)}.")
    size, dims = doc['M'], doc['dv']
    if not _is_int(size) or not _is_int(dims):
        raise ParseError(f'{path}: M and dv must be integers.')
    labels = doc['labels']
    if not isinstance(labels, list) or not all(map(_is_int, labels)):
        raise ParseError(f'{path}: labels must be a list of integers.')
    try:
        coords = np.array(doc['points'], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f'{path}: malformed points ({exc}).') from exc
    if coords.shape != (size, dims, 2) or len(labels) != size:
        raise ParseError(
            f'{path}: points must be {size} x {dims} [re, im] pairs ' +
            f'with {size} labels.',
        )
    if not isinstance(doc['normalized'], bool):
        raise ParseError(f'{path}: normalized must be true or false.')
    return coords[..., 0] + 1j * coords[..., 1], labels


def load(path):
    """
    Read a constellation file.

    Parameters:
        path (str): JSON constellation file

    Returns:
        MultiDimConstellation with unit average energy

    Raises:
        ParseError: The file is unreadable or malformed
        InvariantViolation: The points break a constellation invariant
    """
    doc = read_json(path)
    points, labels = _parse_document(doc, path)
    checks = ConstellationChecks()
    if doc['normalized']:
        checks.add(checks.check_unit_energy)
    constellation = MultiDimConstellation(
        str(doc['name']),
        points,
        labels=labels,
        checks=checks,
    )
    if doc['normalized']:
        return constellation
    return normalize_energy(constellation)


def _coordinate(value):
    return f'{float(value):#.{COORDINATE_DIGITS}g}'


def _points_text(points):
    rows = (
        '[' + ', '.join(
            f'[{_coordinate(coord.real)}, {_coordinate(coord.imag)}]' for coord in row
        ) + ']'
        for row in points
    )
    return '[' + ', '.join(rows) + ']'


def save(c, path):
    """
    Write a constellation file.

    Coordinates are written with 17 significant digits, so loading
    reproduces every coordinate exactly.

    Parameters:
        c (MultiDimConstellation): Constellation
        path (str): Destination
    """
    write_json({
        'name': c.name,
        'M': c.M,
        'dv': c.dv,
        'labels': [int(label) for label in c.labels],
        'points': None,
        'normalized': abs(average_energy(c) - 1) <= ENERGY_TOLERANCE,
    }, path, raw={'points': _points_text(c.points)})


def apply_rotation(c, rot):
    """
    Apply a unitary transform to every point.

    Parameters:
        c (MultiDimConstellation): Constellation
        rot (array_like): dv unit-magnitude phases or a dv x dv unitary

    Returns:
        MultiDimConstellation

    Raises:
        DimensionMismatch: rot does not match dv
        NotUnitary: rot is not unitary within 1e-9
    """
    matrix = np.asarray(rot, dtype=complex)
    if matrix.ndim == 1 and matrix.shape == (c.dv,):
        matrix = np.diag(matrix)
    elif matrix.shape != (c.dv, c.dv):
        raise DimensionMismatch(
            f'Rotation of shape {matrix.shape} does not fit dv={c.dv}.',
        )
    gram = matrix @ matrix.conj().T
    if np.max(np.abs(gram - np.eye(c.dv))) > UNITARY_TOLERANCE:
        raise NotUnitary('Rotation is not unitary within 1e-9.')
    return c.with_points(c.points @ matrix.T)


def bundled_path(name):
    """
    Location a bundled constellation file would have.

    Parameters:
        name (str): Catalog name such as "16-Beko"

    Returns:
        str
    """
    stem = name.lower().replace('-', '')
    return os.path.join(data_dir, f'{stem}.json')


def bundled_files():
    """
    List bundled constellation files.

    Returns:
        list: Sorted paths of every JSON file in the data directory
    """
    if not os.path.isdir(data_dir):
        return []
    return sorted(
        os.path.join(data_dir, fname)
        for fname in os.listdir(data_dir)
        if fname.endswith('.json')
    )


def resolve(name_or_path):
    """
    Find a constellation by builtin name, file path or bundled name.

    Parameters:
        name_or_path (str): Builtin name, path to a JSON file, or the
            catalog name of a bundled file

    Returns:
        MultiDimConstellation

    Raises:
        UnknownName: Nothing matches
        ParseError: A matching file is malformed
        InvariantViolation: A matching file breaks an invariant
    """
    if name_or_path.upper() in _builtins:
        return builtin(name_or_path)
    if os.path.isfile(name_or_path):
        return load(name_or_path)
    bundled = bundled_path(name_or_path)
    if os.path.isfile(bundled):
        return load(bundled)
    raise UnknownName(
        f'No builtin, file or bundled constellation named {name_or_path}.',
    )


def catalog():
    """
    Every constellation available without a path.

    Returns:
        list: (name, source) tuples, builtins first, where source is
        'builtin' or the bundled file path
    """
    entries = [(name, 'builtin') for name in builtin_names]
    for path in bundled_files():
        entries.append((load(path).name, path))
    return entries
