"""Key performance indicators of multidimensional constellations."""

import csv
import io
from dataclasses import dataclass

import numpy as np
from sortedcontainers import SortedKeyList

from scmatools.errors import DegeneratePair, UnsupportedSize

TIE_TOLERANCE = 1e-9
PROJECTION_TOLERANCE = 1e-6
COMPONENT_TOLERANCE = 1e-9

fieldnames = ['name', 'd2_e_min', 'tau_e', 'd2_p_min', 'tau_p', 'L', 'Nd', 'gray']


@dataclass(frozen=True)
class KpiReport(object):
    """The seven indicators of one constellation."""

    name: str
    d2_e_min: float
    tau_e: float
    d2_p_min: float
    tau_p: float
    L: int  # noqa:N815
    Nd: float  # noqa:N815
    gray: bool

    def row(self):
        """
        CSV cells in table column order.

        Returns:
            list of str, numbers to 6 significant digits
        """
        return [
            self.name,
            f'{self.d2_e_min:.6g}',
            f'{self.tau_e:.6g}',
            f'{self.d2_p_min:.6g}',
            f'{self.tau_p:.6g}',
            str(self.L),
            f'{self.Nd:.6g}',
            'yes' if self.gray else 'no',
        ]


def _pairs(c):
    """
    Per-dimension squared differences of every unordered pair.

    Returns:
        tuple: (first, second, squares) where squares is P x dv
    """
    if c.M < 2:
        raise UnsupportedSize(f'{c.name}: KPIs need at least two points.')
    first, second = np.triu_indices(c.M, 1)
    diff = c.points[first] - c.points[second]
    squares = diff.real * diff.real + diff.imag * diff.imag
    return first, second, squares


def _euclidean(squares):
    total = squares[:, 0]
    for dim in range(1, squares.shape[1]):
        total = total + squares[:, dim]
    return total


def _differing(squares):
    return squares > COMPONENT_TOLERANCE * COMPONENT_TOLERANCE


def _product(squares):
    differing = _differing(squares)
    if not np.all(differing.any(axis=1)):
        raise DegeneratePair('Two points coincide in every dimension.')
    total = np.ones(len(squares))
    for dim in range(squares.shape[1]):
        total = total * np.where(differing[:, dim], squares[:, dim], 1.0)
    return total


def _minimal(first, second, values):
    lowest = values.min()
    ties = np.flatnonzero(values <= lowest * (1 + TIE_TOLERANCE))
    return float(lowest), [(int(first[idx]), int(second[idx])) for idx in ties]


def euclidean_min(c):
    """
    Squared minimum Euclidean distance and the pairs achieving it.

    Parameters:
        c (MultiDimConstellation): Constellation with M >= 2

    Returns:
        tuple: (d2_e_min, list of label pairs within 1e-9 relative)
    """
    first, second, squares = _pairs(c)
    return _minimal(first, second, _euclidean(squares))


def kissing_e(c):
    """
    Euclidean kissing number, 2 * (minimal pairs) / M.

    Parameters:
        c (MultiDimConstellation): Constellation with M >= 2

    Returns:
        float
    """
    _, pairs = euclidean_min(c)
    return 2 * len(pairs) / c.M


def product_min(c):
    """
    Squared minimum product distance and the pairs achieving it.

    The product runs over the complex dimensions in which the two points
    differ by more than 1e-9.

    Parameters:
        c (MultiDimConstellation): Constellation with M >= 2

    Returns:
        tuple: (d2_p_min, list of label pairs)

    Raises:
        DegeneratePair: Two points agree in every dimension
    """
    first, second, squares = _pairs(c)
    return _minimal(first, second, _product(squares))


def kissing_p(c):
    """
    Product kissing number, 2 * (minimal pairs) / M.

    Parameters:
        c (MultiDimConstellation): Constellation with M >= 2

    Returns:
        float
    """
    _, pairs = product_min(c)
    return 2 * len(pairs) / c.M


def diversity_order(c):
    """
    Modulation diversity order.

    Parameters:
        c (MultiDimConstellation): Constellation with M >= 2

    Returns:
        int: Minimum number of differing complex dimensions over all pairs
    """
    _, _, squares = _pairs(c)
    return int(_differing(squares).sum(axis=1).min())


def _distinct_count(values):
    seen = SortedKeyList(key=lambda value: value.real)
    for value in values:
        window = seen.irange_key(
            value.real - PROJECTION_TOLERANCE,
            value.real + PROJECTION_TOLERANCE,
        )
        if not any(abs(value - other) <= PROJECTION_TOLERANCE for other in window):
            seen.add(value)
    return len(seen)


def distinct_points(c):
    """
    Average number of distinct projections per complex dimension.

    Parameters:
        c (MultiDimConstellation): Constellation

    Returns:
        float
    """
    counts = [_distinct_count(c.points[:, dim]) for dim in range(c.dv)]
    return float(np.mean(counts))


def gray_check(c):
    """
    Check Gray labeling.

    Parameters:
        c (MultiDimConstellation): Constellation with M >= 2

    Returns:
        bool: True if every minimum-distance pair differs in exactly one bit
    """
    _, pairs = euclidean_min(c)
    return all(bin(left ^ right).count('1') == 1 for left, right in pairs)


def report(c):
    """
    Compute all seven indicators.

    Parameters:
        c (MultiDimConstellation): Constellation with M >= 2

    Returns:
        KpiReport
    """
    first, second, squares = _pairs(c)
    d2_e, e_pairs = _minimal(first, second, _euclidean(squares))
    d2_p, p_pairs = _minimal(first, second, _product(squares))
    return KpiReport(
        name=c.name,
        d2_e_min=d2_e,
        tau_e=2 * len(e_pairs) / c.M,
        d2_p_min=d2_p,
        tau_p=2 * len(p_pairs) / c.M,
        L=int(_differing(squares).sum(axis=1).min()),
        Nd=distinct_points(c),
        gray=all(bin(lft ^ rgt).count('1') == 1 for lft, rgt in e_pairs),
    )


def table(cs):
    """
    Render KPI rows as CSV.

    Parameters:
        cs (list): MultiDimConstellation objects

    Returns:
        str: Header plus one row per constellation
    """
    stream = io.StringIO()
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(fieldnames)
    for constellation in cs:
        writer.writerow(report(constellation).row())
    return stream.getvalue()
