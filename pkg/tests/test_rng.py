"""Tests for keyed random streams."""

import numpy as np
import pytest

from scmatools import rng


class TestStreams:
    """Stream identity and independence."""

    def test_same_key_same_stream(self):
        first = rng.stream(1, rng.NOISE, (2, 3)).standard_normal(5)
        second = rng.stream((1, rng.NOISE), 2, 3).standard_normal(5)
        np.testing.assert_array_equal(first, second)

    def test_different_keys_differ(self):
        first = rng.stream(1, rng.NOISE).standard_normal(5)
        second = rng.stream(1, rng.CHANNEL).standard_normal(5)
        assert not np.any(first == second)

    def test_negative_key(self):
        with pytest.raises(ValueError):
            rng.stream(-1)

    def test_complex_normal_power(self):
        samples = rng.complex_normal(rng.stream(4), (20000,))
        assert np.mean(np.abs(samples) ** 2) == pytest.approx(1, abs=0.05)
