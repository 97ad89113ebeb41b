"""
Counter-based random streams.

Every random draw in SCMAtools comes from a generator keyed by a tuple of
integers, for example (master seed, CHANNEL, snr index, batch index, user).
Streams with different keys are statistically independent and a stream never
depends on how many draws were taken from any other stream, so results do not
depend on iteration order or on the number of worker processes.
"""

import numpy as np

CHANNEL = 1
NOISE = 2
SYMBOL = 3
MESSAGE = 4
INTERLEAVER = 5
INSTANCE = 6


def _flatten(keys):
    flat = []
    for key in keys:
        if isinstance(key, (tuple, list)):
            flat.extend(_flatten(key))
        else:
            flat.append(int(key))
    return flat


def stream(*keys):
    """
    Create the generator for a key.

    Parameters:
        *keys (int or tuple): Non-negative integers identifying the stream

    Returns:
        numpy.random.Generator backed by Philox

    Raises:
        ValueError: A key is negative
    """
    flat = _flatten(keys)
    if any(key < 0 for key in flat):
        raise ValueError(f'Stream keys must be non-negative: {flat}')
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(flat)))


def complex_normal(generator, shape):
    """
    Draw circularly symmetric CN(0, 1) samples.

    Parameters:
        generator (numpy.random.Generator): Source stream
        shape (tuple): Output shape

    Returns:
        numpy.ndarray of complex128
    """
    pair = generator.standard_normal((2,) + tuple(shape))
    return (pair[0] + 1j * pair[1]) / np.sqrt(2)
