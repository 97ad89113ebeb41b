"""Rayleigh fading cases and complex AWGN."""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from scmatools import rng
from scmatools.errors import ConfigError, InvalidN0


class ChannelCase(Enum):
    """Correlation structure of the fading coefficients."""

    FSC = 'fsc'
    FIC = 'fic'
    FFSC = 'ffsc'
    FFIC = 'ffic'
    SFSC = 'sfsc'
    SFIC = 'sfic'
    AWGN = 'awgn'

    @property
    def independent_res(self):
        """True if a user's REs fade independently."""
        return self in {ChannelCase.FIC, ChannelCase.FFIC, ChannelCase.SFIC}

    @property
    def independent_uses(self):
        """True if every channel use sees a fresh draw."""
        return self in {ChannelCase.FFSC, ChannelCase.FFIC}

    @property
    def uncoded(self):
        """True for the cases defined with a single channel use."""
        return self in {ChannelCase.FSC, ChannelCase.FIC}

    @classmethod
    def parse(cls, name):
        """
        Look a case up by its configuration name.

        Parameters:
            name (str or ChannelCase): e.g. "fic"

        Returns:
            ChannelCase

        Raises:
            ConfigError: The name is unknown
        """
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).lower())
        except ValueError as exc:
            choices = ', '.join(case.value for case in cls)
            raise ConfigError(f'Unknown channel case {name}; use one of {choices}.') from exc


@dataclass(frozen=True)
class ChannelRealization(object):
    """Fading coefficients of every user, RE and channel use."""

    h: np.ndarray
    case: ChannelCase
    seed: tuple


def _as_key(seed):
    if isinstance(seed, (tuple, list)):
        return tuple(seed)
    return (seed,)


def _user_shape(case, res, uses):
    return (
        res if case.independent_res else 1,
        uses if case.independent_uses else 1,
    )


def draw(case, users, res, uses=1, seed=0, batch=None):
    """
    Draw fading coefficients.

    Each user has its own random stream, so a user's coefficients do not
    depend on how many other users are drawn.

    Parameters:
        case (ChannelCase): Correlation case
        users (int): K
        res (int): N
        uses (int): Channel uses N_cu
        seed (int or tuple): Stream key prefix
        batch (int): Optional number of independent realizations

    Returns:
        ChannelRealization whose h has shape (K, N, N_cu), or
        (batch, K, N, N_cu) when batch is given

    Raises:
        ConfigError: A dimension is smaller than one
    """
    case = ChannelCase.parse(case)
    if min(users, res, uses) < 1 or (batch is not None and batch < 1):
        raise ConfigError('Channel dimensions must be at least one.')
    key = _as_key(seed)
    lead = () if batch is None else (batch,)
    full = lead + (res, uses)
    if case is ChannelCase.AWGN:
        coeffs = np.ones(lead + (users, res, uses), dtype=complex)
        return ChannelRealization(coeffs, case, key)

    per_user = []
    for user in range(users):
        generator = rng.stream(key, rng.CHANNEL, user)
        sample = rng.complex_normal(generator, lead + _user_shape(case, res, uses))
        per_user.append(np.broadcast_to(sample, full))
    coeffs = np.stack(per_user, axis=len(lead))
    return ChannelRealization(coeffs, case, key)


def noise(res, uses, n0, seed=0, batch=None):
    """
    Circularly symmetric complex Gaussian noise.

    Parameters:
        res (int): N
        uses (int): Channel uses N_cu
        n0 (float): Per-component variance, N0/2 on each of re and im
        seed (int or tuple): Stream key prefix
        batch (int): Optional leading batch size

    Returns:
        numpy.ndarray of shape (N, N_cu) or (batch, N, N_cu)

    Raises:
        InvalidN0: n0 is not a positive finite number
    """
    if not np.isfinite(n0) or n0 <= 0:
        raise InvalidN0(f'N0 must be positive, got {n0}.')
    lead = () if batch is None else (batch,)
    generator = rng.stream(_as_key(seed), rng.NOISE)
    return np.sqrt(n0) * rng.complex_normal(generator, lead + (res, uses))


def n0_from_snr(snr_db, bits_per_symbol, rate=1.0):
    """
    Noise density for a per-bit SNR.

    Uses SNR = Es / (R L_M N0) with unit symbol energy.

    Parameters:
        snr_db (float): Eb/N0 (uncoded) or Emb/N0 (coded) in dB
        bits_per_symbol (int): L_M
        rate (float): Code rate R in (0, 1]

    Returns:
        float

    Raises:
        ConfigError: rate is outside (0, 1]
    """
    if not 0 < rate <= 1:
        raise ConfigError(f'Code rate {rate} must lie in (0, 1].')
    return 1 / (rate * bits_per_symbol * 10 ** (snr_db / 10))
