"""Shared fixtures and the slow-test switch."""

import os

import pytest

from scmatools import constellation
from scmatools.scma import SystemConfig, canonical_indicator


def pytest_addoption(parser):
    """Register --runslow."""
    parser.addoption(
        '--runslow',
        action='store_true',
        default=False,
        help='run long Monte Carlo tests',
    )


def pytest_collection_modifyitems(config, items):
    """Skip slow tests unless --runslow is given."""
    if config.getoption('--runslow'):
        return
    skip_slow = pytest.mark.skip(reason='needs --runslow')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def t4qam():
    """The T4QAM builtin."""
    return constellation.builtin('T4QAM')


@pytest.fixture
def lds4():
    """The 4-LDS builtin."""
    return constellation.builtin('4-LDS')


@pytest.fixture
def canonical():
    """The six-user, four-RE indicator matrix."""
    return canonical_indicator()


@pytest.fixture
def t4qam_system(canonical, t4qam):
    """Canonical system with every user on T4QAM."""
    return SystemConfig(canonical, t4qam)


@pytest.fixture
def lds4_system(canonical, lds4):
    """Canonical system with every user on 4-LDS."""
    return SystemConfig(canonical, lds4)


def bundled_or_skip(name):
    """
    Load a bundled constellation or skip the calling test.

    Parameters:
        name (str): Catalog name

    Returns:
        MultiDimConstellation
    """
    path = constellation.bundled_path(name)
    if not os.path.isfile(path):
        pytest.skip(f'bundled constellation file {path} is not shipped')
    return constellation.load(path)
