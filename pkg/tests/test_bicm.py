"""Tests for codecs, interleaving and the coded frame chain."""

import numpy as np
import pytest

from scmatools import constellation
from scmatools.bicm import (
    DEFAULT_FRAME_LENGTH,
    FramePlan,
    IdentityCodec,
    RepetitionCodec,
    assemble,
    codec_from_spec,
    deinterleave,
    identity_codec,
    interleave,
    repetition_codec,
    run_coded_frame,
    segment,
)
from scmatools.detector import FactorGraph, hypotheses
from scmatools.errors import ConfigError, LengthMismatch
from scmatools.harness import default_iterations
from scmatools.scma import SystemConfig


class TestCodecs:
    """Identity and repetition codes."""

    def test_identity(self):
        codec = identity_codec()
        assert codec.rate == 1
        assert codec.encode([1, 0, 1]).tolist() == [1, 0, 1]
        assert codec.decode([-2.0, 0.5, -0.1]).tolist() == [1, 0, 1]

    def test_repetition_encode(self):
        assert repetition_codec(3).encode([1, 0]).tolist() == [1, 1, 1, 0, 0, 0]

    def test_repetition_decode_sums_copies(self):
        codec = repetition_codec(3)
        llrs = [4.0, -1.0, -1.0, -5.0, 1.0, 1.0]
        assert codec.decode(llrs).tolist() == [0, 1]

    def test_repetition_decode_checks_length(self):
        with pytest.raises(LengthMismatch):
            repetition_codec(3).decode(np.zeros(7))

    def test_message_length(self):
        assert identity_codec().message_length(120) == 120
        assert repetition_codec(3).message_length(120) == 40
        with pytest.raises(LengthMismatch):
            repetition_codec(7).message_length(120)

    def test_from_document(self):
        assert isinstance(codec_from_spec({'type': 'identity'}), IdentityCodec)
        codec = codec_from_spec({'type': 'repetition'})
        assert isinstance(codec, RepetitionCodec)
        assert codec.n == 3
        assert codec_from_spec(codec.to_dict()).n == 3

    @pytest.mark.parametrize('spec', [
        {'type': 'turbo'},
        {'type': 'repetition', 'n': 0},
        {'type': 'repetition', 'n': 2.5},
        {'type': 'identity', 'rate': 1},
        'identity',
    ])
    def test_from_document_rejects(self, spec):
        with pytest.raises(ConfigError):
            codec_from_spec(spec)


class TestFramePlan:
    """Interleaving and symbol grouping."""

    def test_uses(self):
        assert FramePlan.identity(120, 2).uses == 60

    def test_symbol_size_must_divide(self):
        with pytest.raises(LengthMismatch):
            FramePlan.identity(10, 4)

    def test_seeded_plan_is_deterministic(self):
        first = FramePlan.seeded(120, 2, 3)
        second = FramePlan.seeded(120, 2, 3)
        np.testing.assert_array_equal(first.permutation, second.permutation)
        assert sorted(first.permutation.tolist()) == list(range(120))

    def test_rejects_non_permutation(self):
        with pytest.raises(ConfigError):
            FramePlan(4, 2, [0, 0, 1, 2])

    def test_deinterleave_restores_order(self):
        plan = FramePlan.seeded(12, 2, 1)
        values = np.arange(12.0)
        np.testing.assert_array_equal(deinterleave(interleave(values, plan), plan), values)

    @pytest.mark.parametrize('n_c', [2, 120, 1000, 4096])
    def test_seeded_interleaver_is_bijective(self, n_c):
        plan = FramePlan.seeded(n_c, 2, n_c)
        np.testing.assert_array_equal(np.sort(plan.permutation), np.arange(n_c))
        values = np.arange(n_c)
        np.testing.assert_array_equal(deinterleave(interleave(values, plan), plan), values)

    def test_interleave_checks_length(self):
        with pytest.raises(LengthMismatch):
            interleave(np.zeros(10), FramePlan.identity(12, 2))


class TestSegmentation:
    """Bits to labels and LLR blocks to streams."""

    def test_segment_is_big_endian(self):
        assert segment([0, 1, 1, 1, 1, 0], 2).tolist() == [1, 3, 2]

    def test_segment_checks_length(self):
        with pytest.raises(LengthMismatch):
            segment([0, 1, 1], 2)

    def test_assemble(self):
        blocks = np.arange(12).reshape(2, 3, 2)
        assert assemble(blocks).tolist() == [[0, 1, 2, 3, 4, 5], [6, 7, 8, 9, 10, 11]]

    def test_assemble_needs_two_axes(self):
        with pytest.raises(LengthMismatch):
            assemble(np.zeros(4))


class TestCodedFrame:
    """The full transmit and receive chain of one frame."""

    def test_high_snr_frame_is_error_free(self, t4qam_system):
        plan = FramePlan.seeded(120, 2, 0)
        outcome = run_coded_frame(
            repetition_codec(3), plan, t4qam_system, 'ffic', 40, (1, 0, 0, 0), 3,
        )
        assert outcome.message_bits == 40
        assert outcome.bit_errors.shape == (6,)
        assert int(outcome.bit_errors.sum()) == 0
        assert not outcome.frame_errors.any()

    def test_frames_are_reproducible(self, t4qam_system):
        plan = FramePlan.seeded(120, 2, 0)
        first = run_coded_frame(identity_codec(), plan, t4qam_system, 'ffic', 2, 5, 3)
        second = run_coded_frame(identity_codec(), plan, t4qam_system, 'ffic', 2, 5, 3)
        np.testing.assert_array_equal(first.bit_errors, second.bit_errors)
        np.testing.assert_array_equal(first.symbol_errors, second.symbol_errors)

    def test_low_snr_frame_has_errors(self, t4qam_system):
        plan = FramePlan.seeded(120, 2, 0)
        outcome = run_coded_frame(identity_codec(), plan, t4qam_system, 'ffic', -5, 6, 3)
        assert outcome.bit_errors.sum() > 0
        assert outcome.symbol_errors.sum() > 0

    @pytest.mark.parametrize('case', ['fsc', 'fic'])
    def test_single_use_cases_are_rejected(self, t4qam_system, case):
        with pytest.raises(ConfigError):
            run_coded_frame(identity_codec(), FramePlan.identity(120, 2), t4qam_system, case, 5, 0, 3)

    def test_plan_must_match_constellation(self, t4qam_system):
        with pytest.raises(ConfigError):
            run_coded_frame(identity_codec(), FramePlan.identity(120, 4), t4qam_system, 'ffic', 5, 0, 3)


class TestRoundTrip:
    """Error-free frames when the superposition is uniquely decodable."""

    @pytest.mark.parametrize('codec', [identity_codec(), repetition_codec(3)], ids=['identity', 'repetition'])
    @pytest.mark.parametrize('name', constellation.builtin_names)
    def test_near_noiseless_fast_fading(self, name, codec, canonical):
        system = SystemConfig(canonical, constellation.builtin(name))
        plan = FramePlan.seeded(DEFAULT_FRAME_LENGTH, system.bits_per_symbol, 0)
        graph = FactorGraph(system)
        for frame in range(3):
            outcome = run_coded_frame(
                codec, plan, system, 'ffic', 150, (7, frame), default_iterations(system.M), graph=graph,
            )
            assert int(outcome.bit_errors.sum()) == 0
            assert int(outcome.symbol_errors.sum()) == 0

    def test_shared_constellation_is_ambiguous_without_fading(self, t4qam_system):
        books = t4qam_system.codebooks()
        tuples = hypotheses(t4qam_system)
        received = books[np.arange(t4qam_system.K), tuples].sum(axis=1)
        stacked = np.round(np.concatenate([received.real, received.imag], axis=1), 9)
        assert len(np.unique(stacked, axis=0)) < len(tuples)
