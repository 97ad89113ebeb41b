"""Sparse user-to-RE structure, codebook assembly and superposition."""

from itertools import combinations
from math import comb

import numpy as np

from scmatools.constellation import MultiDimConstellation, apply_rotation
from scmatools.errors import ConfigError, DimensionMismatch

_canonical = (
    (0, 1, 1, 0, 1, 0),
    (1, 0, 1, 0, 0, 1),
    (0, 1, 0, 1, 0, 1),
    (1, 0, 0, 1, 1, 0),
)


def _binary(entries, what):
    try:
        matrix = np.array(entries, dtype=int)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f'{what} must be a rectangular matrix of 0 and 1: {exc}') from exc
    if matrix.ndim != 2 or not np.all((matrix == 0) | (matrix == 1)):
        raise ConfigError(f'{what} must be a two dimensional binary matrix.')
    matrix.setflags(write=False)
    return matrix


class MappingMatrix(object):
    """Binary N x dv matrix placing a user's dv dimensions on REs."""

    def __init__(self, entries):
        """
        Create a mapping matrix.

        Parameters:
            entries (array_like): N x dv binary matrix

        Raises:
            ConfigError: A column does not hold exactly one 1 or a row
                holds more than one
        """
        self.matrix = _binary(entries, 'Mapping matrix')
        if np.any(self.matrix.sum(axis=0) != 1):
            raise ConfigError('Each mapping column must contain one 1.')
        if np.any(self.matrix.sum(axis=1) > 1):
            raise ConfigError('Each mapping row may contain at most one 1.')

    @property
    def N(self):  # noqa:N802
        """Number of REs."""
        return self.matrix.shape[0]

    @property
    def dv(self):
        """Number of occupied REs."""
        return self.matrix.shape[1]

    @property
    def rows(self):
        """RE index carrying each dimension, in column order."""
        return self.matrix.argmax(axis=0)

    def occupancy(self):
        """
        The indicator column this mapping realizes, diag(F F^T).

        Returns:
            numpy.ndarray of N ints
        """
        return np.diag(self.matrix @ self.matrix.T)


class IndicatorMatrix(object):
    """Binary N x K user-to-RE indicator matrix."""

    def __init__(self, entries, distinct=True):
        """
        Create an indicator matrix.

        Parameters:
            entries (array_like): N x K binary matrix
            distinct (bool): Require every user to occupy a different RE
                set. Star-shaped single-RE graphs turn this off.

        Raises:
            ConfigError: Column sums or row sums are not constant, or two
                users share the same REs
        """
        self.entries = _binary(entries, 'Indicator matrix')
        columns = self.entries.sum(axis=0)
        rows = self.entries.sum(axis=1)
        if columns.min() < 1 or np.any(columns != columns[0]):
            raise ConfigError('Every user must occupy the same number of REs.')
        if rows.min() < 1 or np.any(rows != rows[0]):
            raise ConfigError('Every RE must carry the same number of users.')
        occupied = {tuple(col) for col in self.entries.T}
        if distinct and len(occupied) != self.K:
            raise ConfigError('Two users occupy identical REs.')

    @property
    def N(self):  # noqa:N802
        """Number of REs."""
        return self.entries.shape[0]

    @property
    def K(self):  # noqa:N802
        """Number of users."""
        return self.entries.shape[1]

    @property
    def dv(self):
        """REs per user."""
        return int(self.entries[:, 0].sum())

    @property
    def dc(self):
        """Users per RE."""
        return int(self.entries[0].sum())

    @property
    def fully_loaded(self):
        """True if K equals C(N, dv)."""
        return self.K == comb(self.N, self.dv)

    def res_of(self, user):
        """
        REs occupied by a user.

        Parameters:
            user (int): 0-based user index

        Returns:
            numpy.ndarray of dv increasing RE indices
        """
        return np.flatnonzero(self.entries[:, user])

    def users_of(self, re):
        """
        Users sharing an RE.

        Parameters:
            re (int): 0-based RE index

        Returns:
            numpy.ndarray of dc increasing user indices
        """
        return np.flatnonzero(self.entries[re])


def canonical_indicator():
    """
    The six-user, four-RE indicator matrix used by every reference run.

    Returns:
        IndicatorMatrix with K=6, N=4, dv=2, dc=3
    """
    return IndicatorMatrix(_canonical)


def full_load_indicator(N, dv):  # noqa:N803
    """
    Enumerate every dv-subset of N REs.

    Parameters:
        N (int): Number of REs
        dv (int): REs per user

    Returns:
        IndicatorMatrix with C(N, dv) columns in lexicographic subset order

    Raises:
        ConfigError: dv is not in 1..N
    """
    for name, value in (('N', N), ('dv', dv)):
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
            raise ConfigError(f'{name} must be an integer, got {value!r}.')
    if not 1 <= dv <= N:
        raise ConfigError(f'dv={dv} must lie between 1 and N={N}.')
    subsets = list(combinations(range(N), dv))
    entries = np.zeros((N, len(subsets)), dtype=int)
    for user, subset in enumerate(subsets):
        entries[list(subset), user] = 1
    return IndicatorMatrix(entries)


def mapping_from_column(S, k):  # noqa:N803
    """
    Mapping matrix of one user.

    Parameters:
        S (IndicatorMatrix): Indicator matrix
        k (int): 0-based user index

    Returns:
        MappingMatrix whose columns follow increasing RE order
    """
    res = S.res_of(k)
    entries = np.zeros((S.N, len(res)), dtype=int)
    entries[res, np.arange(len(res))] = 1
    return MappingMatrix(entries)


def spread(F, x):  # noqa:N803
    """
    Place a dv-dimensional point on its REs.

    Parameters:
        F (MappingMatrix): The user's mapping
        x (array_like): dv complex coordinates

    Returns:
        numpy.ndarray: N complex values, zero off the user's REs

    Raises:
        DimensionMismatch: len(x) != F.dv
    """
    x = np.asarray(x, dtype=complex)
    if x.shape != (F.dv,):
        raise DimensionMismatch(f'Point of shape {x.shape} does not fit dv={F.dv}.')
    return F.matrix @ x


def superimpose(symbols, channel, noise, mappings):
    """
    Received vector of all users through their channels plus noise.

    Computes y = sum_k diag(h_k) F_k x_k + w with any number of leading
    batch axes.

    Parameters:
        symbols (array_like): (..., K, dv) transmitted points
        channel (array_like): (..., K, N) fading coefficients
        noise (array_like): (..., N) additive noise
        mappings (list): K MappingMatrix objects

    Returns:
        numpy.ndarray of shape (..., N)

    Raises:
        DimensionMismatch: Shapes disagree with each other or the mappings
    """
    symbols = np.asarray(symbols, dtype=complex)
    channel = np.asarray(channel, dtype=complex)
    noise = np.asarray(noise, dtype=complex)
    users = len(mappings)
    res = mappings[0].N if users else 0
    dims = mappings[0].dv if users else 0
    if symbols.shape[-2:] != (users, dims):
        raise DimensionMismatch(f'Symbols of shape {symbols.shape} for K={users}.')
    if channel.shape[-2:] != (users, res):
        raise DimensionMismatch(f'Channel of shape {channel.shape} for N={res}.')
    if noise.shape[-1:] != (res,):
        raise DimensionMismatch(f'Noise of shape {noise.shape} for N={res}.')
    stacked = np.stack([mapping.matrix for mapping in mappings]).astype(complex)
    spread_all = np.einsum('knd,...kd->...kn', stacked, symbols)
    return np.sum(channel * spread_all, axis=-2) + noise


class SystemConfig(object):
    """Users, REs, mappings and per-user constellations of one system."""

    def __init__(self, indicator, constellations, rotations=None):
        """
        Create a system configuration.

        Parameters:
            indicator (IndicatorMatrix): User-to-RE structure
            constellations (MultiDimConstellation or list): Shared mother
                constellation or one constellation per user
            rotations (list): Optional per-user rotations, each dv phases or
                a dv x dv unitary, applied to the user's constellation

        Raises:
            ConfigError: Sizes disagree across users or with the indicator
        """
        self.indicator = indicator
        if isinstance(constellations, MultiDimConstellation):
            constellations = [constellations] * indicator.K
        constellations = list(constellations)
        if len(constellations) != indicator.K:
            raise ConfigError(
                f'{len(constellations)} constellations for K={indicator.K}.',
            )
        if rotations is not None:
            if len(rotations) != indicator.K:
                raise ConfigError(f'{len(rotations)} rotations for K={indicator.K}.')
            constellations = [
                apply_rotation(const, rot)
                for const, rot in zip(constellations, rotations)
            ]
        sizes = {(const.M, const.dv) for const in constellations}
        if len(sizes) != 1:
            raise ConfigError('All users must share M and dv.')
        size, dims = sizes.pop()
        if dims != indicator.dv:
            raise ConfigError(
                f'Constellation dv={dims} but indicator dv={indicator.dv}.',
            )
        self.M = size
        self.constellations = constellations
        self.mappings = [
            mapping_from_column(indicator, user) for user in range(indicator.K)
        ]
        self.user_res = np.array([
            indicator.res_of(user) for user in range(indicator.K)
        ])
        self.re_users = np.array([
            indicator.users_of(re) for re in range(indicator.N)
        ])
        self._points = np.stack([const.points for const in constellations])

    @property
    def K(self):  # noqa:N802
        """Number of users."""
        return self.indicator.K

    @property
    def N(self):  # noqa:N802
        """Number of REs."""
        return self.indicator.N

    @property
    def dv(self):
        """REs per user."""
        return self.indicator.dv

    @property
    def dc(self):
        """Users per RE."""
        return self.indicator.dc

    @property
    def bits_per_symbol(self):
        """Label length log2(M)."""
        return self.constellations[0].bits_per_symbol

    def codebooks(self):
        """
        Sparse codewords V_k = F_k X_k of every user.

        Returns:
            numpy.ndarray of shape (K, M, N)
        """
        stacked = np.stack([mapping.matrix for mapping in self.mappings])
        return np.einsum('knd,kmd->kmn', stacked.astype(complex), self._points)

    def re_table(self):
        """
        Value each user contributes to each of its REs, per symbol.

        Returns:
            numpy.ndarray of shape (N, dc, M); entry [n, p, m] is the
            coordinate of symbol m of user re_users[n, p] on RE n
        """
        table = np.empty((self.N, self.dc, self.M), dtype=complex)
        for re in range(self.N):
            for slot, user in enumerate(self.re_users[re]):
                dim = int(np.flatnonzero(self.user_res[user] == re)[0])
                table[re, slot] = self._points[user, :, dim]
        return table

    def symbols(self, labels):
        """
        Points transmitted for the given labels.

        Parameters:
            labels (array_like): (..., K) integer labels

        Returns:
            numpy.ndarray of shape (..., K, dv)
        """
        labels = np.asarray(labels)
        users = np.arange(self.K)
        return self._points[users, labels]

    def to_dict(self):
        """
        JSON-ready description for result provenance.

        Returns:
            dict
        """
        return {
            'K': self.K,
            'N': self.N,
            'dv': self.dv,
            'dc': self.dc,
            'M': self.M,
            'indicator': self.indicator.entries.tolist(),
            'constellations': [const.name for const in self.constellations],
        }
