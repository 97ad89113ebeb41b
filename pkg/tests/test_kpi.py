"""Tests for constellation key performance indicators."""

from itertools import combinations

import numpy as np
import pytest
from conftest import bundled_or_skip

from scmatools import constellation, kpi, rng
from scmatools.checks import ConstellationChecks
from scmatools.constellation import MultiDimConstellation
from scmatools.errors import DegeneratePair, UnsupportedSize

EXACT = 1e-9
APPROX = 0.01

# name: (d2_e_min, tau_e, d2_p_min, tau_p, L, Nd, gray)
four_point_rows = {
    'T4QAM': (2, 2, 0.64, 2, 2, 4, True),
    '4LQAM': (2, 2, 2, 2, 1, 2, True),
    '4CQAM': (2, 2, 1, 2, 1, 3, True),
    '4-LDS': (2, 2, 1, 2, 2, 4, True),
}

sixteen_point_rows = {
    '16-LDS': (0.4, 3, 0.04, 3, 2, 16, True),
    '16HQAM': (1, 4, 1, 8, 1, 4, True),
}

# Bundled rows: True marks an approximate entry.
bundled_rows = {
    '4-Bao': ((2, 2, 1, 2, 2, 4, True), (False, False, True, False, False, False)),
    '4-Beko': ((2.67, 3, 0.29, 0.5, 2, 4, False), (True, False, True, False, False, False)),
    '16-Bao': ((1, 4, 0.25, 4, 2, 16, True), (False,) * 6),
    '16-Beko': ((1.30, 7.75, 0.02, 0.125, 2, 16, False), (True, False, True, False, False, False)),
    '16CQAM': ((1.03, 2, 0.21, 2, 1, 9, False), (True, False, True, False, False, False)),
    '16LQAM': ((1, 4, 0.25, 4, 1, 9, True), (False,) * 6),
    'T16QAM': ((1, 4, 0.16, 4, 2, 16, True), (False,) * 6),
}


def _as_tuple(report):
    return (
        report.d2_e_min,
        report.tau_e,
        report.d2_p_min,
        report.tau_p,
        report.L,
        report.Nd,
        report.gray,
    )


def _assert_row(report, expected, approximate=(False,) * 6):
    values = _as_tuple(report)
    for got, want, loose in zip(values[:6], expected[:6], approximate):
        assert got == pytest.approx(want, abs=APPROX if loose else EXACT)
    assert values[6] is expected[6]


def _brute_force(const):
    squares = {}
    for left, right in combinations(range(const.M), 2):
        squares[(left, right)] = [abs(a - b) ** 2 for a, b in zip(const.point(left), const.point(right))]
    euclid = {pair: sum(dims) for pair, dims in squares.items()}
    product = {
        pair: float(np.prod([value for value in dims if value > 1e-18]))
        for pair, dims in squares.items()
    }
    d2_e = min(euclid.values())
    d2_p = min(product.values())
    return (
        d2_e,
        2 * sum(value <= d2_e * (1 + 1e-9) for value in euclid.values()) / const.M,
        d2_p,
        2 * sum(value <= d2_p * (1 + 1e-9) for value in product.values()) / const.M,
        min(sum(value > 1e-18 for value in dims) for dims in squares.values()),
    )


class TestPublishedRows:
    """Indicator rows of the fully determined constellations."""

    @pytest.mark.parametrize('name', four_point_rows)
    def test_four_point_rows(self, name):
        _assert_row(kpi.report(constellation.builtin(name)), four_point_rows[name])

    @pytest.mark.parametrize('name', sixteen_point_rows)
    def test_sixteen_point_rows(self, name):
        _assert_row(kpi.report(constellation.builtin(name)), sixteen_point_rows[name])

    @pytest.mark.parametrize('name', bundled_rows)
    def test_bundled_rows(self, name):
        const = bundled_or_skip(name)
        expected, approximate = bundled_rows[name]
        _assert_row(kpi.report(const), expected, approximate)

    def test_circular_example_has_three_distinct_projections(self):
        assert kpi.distinct_points(constellation.builtin('4CQAM')) == 3


class TestIndicators:
    """Individual indicator functions."""

    def test_single_functions_agree_with_report(self, t4qam):
        report = kpi.report(t4qam)
        assert kpi.euclidean_min(t4qam)[0] == report.d2_e_min
        assert kpi.kissing_e(t4qam) == report.tau_e
        assert kpi.product_min(t4qam)[0] == report.d2_p_min
        assert kpi.kissing_p(t4qam) == report.tau_p
        assert kpi.diversity_order(t4qam) == report.L
        assert kpi.gray_check(t4qam) is report.gray

    def test_minimal_pairs_of_t4qam(self, t4qam):
        _, pairs = kpi.euclidean_min(t4qam)
        assert sorted(pairs) == [(0, 1), (0, 2), (1, 3), (2, 3)]

    def test_fractional_kissing_number(self):
        line = MultiDimConstellation('line', [[0], [1], [3], [6]])
        assert kpi.kissing_e(line) == 0.5

    def test_products_skip_equal_dimensions(self):
        const = constellation.builtin('4LQAM')
        assert kpi.product_min(const)[0] == pytest.approx(2, abs=EXACT)
        assert kpi.diversity_order(const) == 1

    def test_non_gray_labeling_is_detected(self):
        points = constellation.builtin('4-LDS').points
        swapped = MultiDimConstellation('swapped', points, labels=[0, 3, 2, 1])
        assert not kpi.gray_check(swapped)

    def test_distinct_points_uses_tolerance(self):
        points = [[0], [1e-8], [1], [2]]
        assert kpi.distinct_points(MultiDimConstellation('close', points)) == 3

    def test_matches_brute_force(self):
        generator = rng.stream(11, rng.INSTANCE)
        for _ in range(5):
            raw = generator.standard_normal((8, 2)) + 1j * generator.standard_normal((8, 2))
            const = constellation.normalize_energy(MultiDimConstellation('random', raw))
            report = kpi.report(const)
            expected = _brute_force(const)
            assert report.d2_e_min == pytest.approx(expected[0], rel=1e-12)
            assert report.tau_e == expected[1]
            assert report.d2_p_min == pytest.approx(expected[2], rel=1e-12)
            assert report.tau_p == expected[3]
            assert report.L == expected[4]

    def test_rotation_keeps_euclidean_indicators(self, lds4):
        rotated = constellation.apply_rotation(lds4, np.exp(1j * np.array([0.7, 0.2])))
        assert kpi.euclidean_min(rotated)[0] == pytest.approx(2, abs=EXACT)
        assert kpi.kissing_e(rotated) == 2

    @pytest.mark.parametrize('name', ['T4QAM', '4-LDS'])
    def test_scaling(self, name):
        const = constellation.builtin(name)
        scaled = const.with_points(2 * const.points, name='scaled')
        plain, grown = _as_tuple(kpi.report(const)), _as_tuple(kpi.report(scaled))
        assert plain[4] == const.dv
        assert grown[0] == pytest.approx(4 * plain[0], rel=1e-12)
        assert grown[2] == pytest.approx(2 ** (2 * const.dv) * plain[2], rel=1e-12)
        assert (grown[1], grown[3], grown[4], grown[5], grown[6]) == (
            plain[1], plain[3], plain[4], plain[5], plain[6],
        )


class TestErrors:
    """Inputs the indicators refuse."""

    def test_single_point(self):
        with pytest.raises(UnsupportedSize):
            kpi.report(MultiDimConstellation('one', [[1, 1]]))

    def test_coincident_pair(self):
        checks = ConstellationChecks()
        checks.check_list.remove(checks.check_distinct_points)
        twins = MultiDimConstellation('twins', [[1, 1], [1, 1], [-1, 0], [0, -1]], checks=checks)
        with pytest.raises(DegeneratePair):
            kpi.product_min(twins)


class TestTable:
    """CSV rendering."""

    def test_table_has_header_and_rows(self):
        names = ['4-LDS', '4LQAM', '4CQAM', 'T4QAM']
        lines = kpi.table([constellation.builtin(name) for name in names]).splitlines()
        assert lines[0] == 'name,d2_e_min,tau_e,d2_p_min,tau_p,L,Nd,gray'
        assert len(lines) == 5
        assert lines[4] == 'T4QAM,2,2,0.64,2,2,4,yes'

    def test_empty_table_is_header_only(self):
        assert kpi.table([]) == 'name,d2_e_min,tau_e,d2_p_min,tau_p,L,Nd,gray\n'
