"""Tests for JSON experiment configuration."""

import json

import numpy as np
import pytest

from scmatools.bicm import RepetitionCodec
from scmatools.channel import ChannelCase
from scmatools.config import ExperimentConfig, load_config
from scmatools.errors import ConfigError, UnknownName
from scmatools.harness import Mode

minimal = {'constellation': 'T4QAM', 'case': 'fic', 'snr_db': [0, 5]}


def _with(**changes):
    document = dict(minimal)
    document.update(changes)
    return document


class TestFromDict:
    """Validation of the configuration document."""

    def test_defaults(self):
        config = ExperimentConfig.from_dict(minimal)
        assert config.case is ChannelCase.FIC
        assert config.mode is Mode.UNCODED_SYMBOL
        assert list(config.grid) == [0, 5]
        assert (config.seed, config.min_errors, config.max_trials) == (0, 200, 10 ** 7)
        assert config.document is minimal

    def test_grid_string(self):
        assert len(ExperimentConfig.from_dict(_with(snr_db='0:20:2')).grid) == 11

    def test_unknown_key_is_named(self):
        with pytest.raises(ConfigError, match='turbo_iterations'):
            ExperimentConfig.from_dict(_with(turbo_iterations=4))

    @pytest.mark.parametrize('key', ['constellation', 'case', 'snr_db'])
    def test_missing_key(self, key):
        document = dict(minimal)
        del document[key]
        with pytest.raises(ConfigError, match=key):
            ExperimentConfig.from_dict(document)

    @pytest.mark.parametrize('changes', [
        {'mode': 'coded'},
        {'case': 'rayleigh'},
        {'seed': 1.5},
        {'exact': 'yes'},
        {'codec': {'type': 'ldpc'}},
        {'snr_db': {'from': 0}},
    ])
    def test_rejected_values(self, changes):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict(_with(**changes))

    def test_not_an_object(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict([minimal])


class TestSystem:
    """Systems built from the document."""

    def test_canonical(self):
        system = ExperimentConfig.from_dict(minimal).system()
        assert (system.K, system.N, system.dv, system.dc) == (6, 4, 2, 3)

    def test_full_load_indicator(self):
        system = ExperimentConfig.from_dict(_with(indicator={'N': 5, 'dv': 2})).system()
        assert (system.K, system.dc) == (10, 4)

    def test_rotation_applies_to_every_user(self):
        system = ExperimentConfig.from_dict(_with(rotation=[np.pi / 2, 0])).system()
        plain = ExperimentConfig.from_dict(minimal).system()
        for user in range(6):
            np.testing.assert_allclose(
                system.constellations[user].points[:, 0],
                1j * plain.constellations[user].points[:, 0],
                atol=1e-15,
            )

    def test_rotation_length(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict(_with(rotation=[0.1])).system()

    @pytest.mark.parametrize('changes', [
        {'rotation': ['a', 0]},
        {'rotation': [0, float('nan')]},
        {'indicator': [[1, 0], [1]]},
        {'indicator': [['x', 1], [1, 0]]},
        {'indicator': {'N': 'x', 'dv': 2}},
        {'indicator': {'N': 4, 'dv': 2.0}},
        {'indicator': {'N': 4}},
    ])
    def test_malformed_values(self, changes):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict(_with(**changes)).system()

    def test_unknown_constellation(self):
        with pytest.raises(UnknownName):
            ExperimentConfig.from_dict(_with(constellation='99-NOPE')).system()


class TestSweep:
    """Conversion into a sweep configuration."""

    def test_to_sweep(self):
        document = _with(
            mode='coded-frame',
            case='ffic',
            codec={'type': 'repetition', 'n': 3},
            workers=2,
        )
        sweep = ExperimentConfig.from_dict(document).to_sweep()
        assert isinstance(sweep.codec, RepetitionCodec)
        assert sweep.workers == 2
        assert sweep.provenance is document
        assert ExperimentConfig.from_dict(document).to_sweep(workers=5).workers == 5

    def test_coded_single_use_case(self):
        document = _with(mode='coded-frame', case='fsc')
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict(document).to_sweep()


class TestLoad:
    """Reading configuration files."""

    def test_load(self, tmp_path):
        path = tmp_path / 'cfg.json'
        path.write_text(json.dumps(minimal))
        assert load_config(str(path)).constellation == 'T4QAM'

    def test_bad_file(self, tmp_path):
        path = tmp_path / 'cfg.json'
        path.write_text('{')
        with pytest.raises(ConfigError):
            load_config(str(path))
