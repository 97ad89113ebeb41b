"""Tests for per-user error counters."""

import numpy as np
import pytest

from scmatools.tally import ErrorTally


class TestErrorTally:
    """Counting and rates."""

    def test_empty_tally(self):
        tally = ErrorTally(6)
        assert len(tally) == 0
        assert list(tally) == [0, 0, 0]
        assert tally.rate('symbol') == 0.0

    def test_add_and_rates(self):
        tally = ErrorTally(2, symbols_per_trial=1, bits_per_trial=2)
        tally.add(10, [1, 3], [2, 4], [1, 3])
        assert tally['symbol'] == 4
        assert tally.denominator('bit') == 40
        assert tally.rate('bit') == pytest.approx(6 / 40)
        assert tally.rate('frame') == pytest.approx(4 / 20)

    def test_merge(self):
        first = ErrorTally(2)
        second = ErrorTally(2)
        first.add(5, [1, 0], [1, 0], [1, 0])
        second.add(7, [0, 2], [0, 3], [0, 2])
        first.merge(second)
        assert first.trials == 12
        np.testing.assert_array_equal(first.counts['bit'], [1, 3])

    def test_unknown_metric(self):
        with pytest.raises(KeyError):
            ErrorTally(1)['packet']
