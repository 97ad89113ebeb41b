"""Bit-interleaved coded modulation over the SCMA uplink."""

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from scmatools import rng
from scmatools.channel import ChannelCase, draw, n0_from_snr, noise
from scmatools.detector import FactorGraph
from scmatools.errors import ConfigError, LengthMismatch
from scmatools.scma import superimpose

LLR_CLAMP = 50.0
DEFAULT_FRAME_LENGTH = 120


class Codec(ABC):
    """Channel code plugged between the message source and the mapper."""

    name = 'codec'

    @property
    @abstractmethod
    def rate(self):
        """Code rate R = K_c / N_c."""

    @abstractmethod
    def encode(self, message):
        """
        Encode message words.

        Parameters:
            message (numpy.ndarray): (..., K_c) bits

        Returns:
            numpy.ndarray: (..., N_c) code bits
        """

    @abstractmethod
    def decode(self, llrs):
        """
        Estimate message words.

        Parameters:
            llrs (numpy.ndarray): (..., N_c) LLRs, positive favors bit 0

        Returns:
            numpy.ndarray: (..., K_c) bits
        """

    def message_length(self, code_length):
        """
        Message bits carried by a code word.

        Parameters:
            code_length (int): N_c

        Returns:
            int

        Raises:
            LengthMismatch: N_c * R is not an integer
        """
        length = code_length * self.rate
        if abs(length - round(length)) > 1e-9 or round(length) < 1:
            raise LengthMismatch(f'N_c={code_length} does not fit rate {self.rate}.')
        return int(round(length))

    def to_dict(self):
        """
        Configuration form of the codec.

        Returns:
            dict
        """
        return {'type': self.name}


def _hard(llrs):
    return (np.asarray(llrs) < 0).astype(np.int8)


class IdentityCodec(Codec):
    """Uncoded pass-through, R = 1."""

    name = 'identity'

    @property
    def rate(self):
        """Code rate."""
        return 1.0

    def encode(self, message):
        """
        Copy the message.

        Parameters:
            message (numpy.ndarray): (..., K_c) bits

        Returns:
            numpy.ndarray
        """
        return np.array(message, dtype=np.int8)

    def decode(self, llrs):
        """
        Threshold every LLR.

        Parameters:
            llrs (numpy.ndarray): (..., N_c) LLRs

        Returns:
            numpy.ndarray
        """
        return _hard(llrs)


class RepetitionCodec(Codec):
    """Repeat every message bit n times, R = 1/n."""

    name = 'repetition'

    def __init__(self, n):
        """
        Create a repetition codec.

        Parameters:
            n (int): Repeat factor

        Raises:
            ConfigError: n < 1
        """
        if n < 1:
            raise ConfigError(f'Repetition factor {n} must be at least one.')
        self.n = n

    @property
    def rate(self):
        """Code rate."""
        return 1 / self.n

    def encode(self, message):
        """
        Repeat each bit in place.

        Parameters:
            message (numpy.ndarray): (..., K_c) bits

        Returns:
            numpy.ndarray: (..., n K_c) bits
        """
        return np.repeat(np.asarray(message, dtype=np.int8), self.n, axis=-1)

    def decode(self, llrs):
        """
        Sum the n copies of each bit, then threshold.

        Parameters:
            llrs (numpy.ndarray): (..., n K_c) LLRs

        Returns:
            numpy.ndarray: (..., K_c) bits

        Raises:
            LengthMismatch: Length is not a multiple of n
        """
        llrs = np.asarray(llrs, dtype=float)
        if llrs.shape[-1] % self.n:
            raise LengthMismatch(f'{llrs.shape[-1]} LLRs for repetition {self.n}.')
        grouped = llrs.reshape(llrs.shape[:-1] + (-1, self.n))
        return _hard(grouped.sum(axis=-1))

    def to_dict(self):
        """
        Configuration form of the codec.

        Returns:
            dict
        """
        return {'type': self.name, 'n': self.n}


def identity_codec():
    """
    Rate one pass-through codec.

    Returns:
        IdentityCodec
    """
    return IdentityCodec()


def repetition_codec(n):
    """
    Rate 1/n repetition codec.

    Parameters:
        n (int): Repeat factor

    Returns:
        RepetitionCodec
    """
    return RepetitionCodec(n)


def codec_from_spec(spec):
    """
    Build a codec from its configuration form.

    Parameters:
        spec (dict): {"type": "identity"} or {"type": "repetition", "n": 3}

    Returns:
        Codec

    Raises:
        ConfigError: Unknown type or bad parameters
    """
    if not isinstance(spec, dict) or 'type' not in spec:
        raise ConfigError(f'Codec must be an object with a type: {spec}.')
    extra = set(spec) - {'type', 'n'}
    if extra:
        raise ConfigError(f"Unknown codec keys: {', '.join(sorted(extra))}.")
    match spec['type']:
        case 'identity':
            return identity_codec()
        case 'repetition':
            repeat = spec.get('n', 3)
            if not isinstance(repeat, int) or isinstance(repeat, bool):
                raise ConfigError(f'Repetition factor must be an integer: {repeat}.')
            return repetition_codec(repeat)
        case other:
            raise ConfigError(f'Unknown codec type: {other}.')


class FramePlan(object):
    """Code word length, symbol grouping and interleaver of a frame."""

    def __init__(self, n_c, bits_per_symbol, permutation):
        """
        Create a frame plan.

        Parameters:
            n_c (int): Code word length N_c
            bits_per_symbol (int): L_M
            permutation (array_like): Interleaver, a permutation of N_c

        Raises:
            LengthMismatch: L_M does not divide N_c or the permutation has
                the wrong length
            ConfigError: permutation is not a bijection
        """
        if n_c < 1 or n_c % bits_per_symbol:
            raise LengthMismatch(f'L_M={bits_per_symbol} does not divide N_c={n_c}.')
        permutation = np.asarray(permutation, dtype=np.int64)
        if permutation.shape != (n_c,):
            raise LengthMismatch(f'Permutation of length {len(permutation)} for N_c={n_c}.')
        if not np.array_equal(np.sort(permutation), np.arange(n_c)):
            raise ConfigError('Interleaver is not a permutation.')
        self.n_c = n_c
        self.bits_per_symbol = bits_per_symbol
        self.permutation = permutation

    @property
    def uses(self):
        """Channel uses N_cu = N_c / L_M."""
        return self.n_c // self.bits_per_symbol

    @classmethod
    def seeded(cls, n_c, bits_per_symbol, seed):
        """
        Plan with a uniformly random interleaver.

        Parameters:
            n_c (int): Code word length
            bits_per_symbol (int): L_M
            seed (int): Interleaver seed

        Returns:
            FramePlan
        """
        permutation = rng.stream(seed, rng.INTERLEAVER).permutation(n_c)
        return cls(n_c, bits_per_symbol, permutation)

    @classmethod
    def identity(cls, n_c, bits_per_symbol):
        """
        Plan without interleaving.

        Parameters:
            n_c (int): Code word length
            bits_per_symbol (int): L_M

        Returns:
            FramePlan
        """
        return cls(n_c, bits_per_symbol, np.arange(n_c))


def _check_length(values, plan):
    if values.shape[-1] != plan.n_c:
        raise LengthMismatch(f'Length {values.shape[-1]} for N_c={plan.n_c}.')


def interleave(bits, plan):
    """
    Permute code bits.

    Parameters:
        bits (array_like): (..., N_c)
        plan (FramePlan): Frame plan

    Returns:
        numpy.ndarray

    Raises:
        LengthMismatch: Wrong length
    """
    bits = np.asarray(bits)
    _check_length(bits, plan)
    return bits[..., plan.permutation]


def deinterleave(llrs, plan):
    """
    Undo `interleave`.

    Parameters:
        llrs (array_like): (..., N_c)
        plan (FramePlan): Frame plan

    Returns:
        numpy.ndarray

    Raises:
        LengthMismatch: Wrong length
    """
    llrs = np.asarray(llrs)
    _check_length(llrs, plan)
    restored = np.empty_like(llrs)
    restored[..., plan.permutation] = llrs
    return restored


def segment(bits, bits_per_symbol):
    """
    Group bits into big-endian labels.

    Parameters:
        bits (array_like): (..., n) bits
        bits_per_symbol (int): L_M

    Returns:
        numpy.ndarray: (..., n / L_M) labels

    Raises:
        LengthMismatch: L_M does not divide n
    """
    bits = np.asarray(bits, dtype=np.int64)
    if bits.shape[-1] % bits_per_symbol:
        raise LengthMismatch(f'{bits.shape[-1]} bits for L_M={bits_per_symbol}.')
    grouped = bits.reshape(bits.shape[:-1] + (-1, bits_per_symbol))
    weights = 2 ** np.arange(bits_per_symbol - 1, -1, -1)
    return grouped @ weights


def assemble(llr_blocks):
    """
    Stitch per-symbol bit LLRs back into a stream.

    Parameters:
        llr_blocks (array_like): (..., symbols, L_M)

    Returns:
        numpy.ndarray: (..., symbols * L_M)

    Raises:
        LengthMismatch: Input has fewer than two axes
    """
    llr_blocks = np.asarray(llr_blocks)
    if llr_blocks.ndim < 2:
        raise LengthMismatch('LLR blocks need a symbol axis and a bit axis.')
    return llr_blocks.reshape(llr_blocks.shape[:-2] + (-1,))


@dataclass
class FrameOutcome(object):
    """Errors of one coded frame for every user."""

    bit_errors: np.ndarray
    frame_errors: np.ndarray
    symbol_errors: np.ndarray
    message_bits: int


def run_coded_frame(
    codec,
    plan,
    config,
    case,
    snr_db,
    seed,
    iterations,
    graph=None,
):
    """
    Send one frame per user through the full coded chain.

    encode, interleave, segment, spread and superimpose over N_cu channel
    uses, detect each use, deinterleave the LLRs and decode.

    Parameters:
        codec (Codec): Channel code
        plan (FramePlan): Frame plan
        config (SystemConfig): System configuration
        case (ChannelCase): Fading case
        snr_db (float): Emb/N0 in dB
        seed (int or tuple): Frame stream key
        iterations (int): MPA iterations
        graph (FactorGraph): Prebuilt detector graph for config

    Returns:
        FrameOutcome

    Raises:
        ConfigError: The case needs a single channel use or the plan and
            configuration disagree
    """
    case = ChannelCase.parse(case)
    if case.uncoded:
        raise ConfigError(f'Case {case.value} is defined for uncoded systems only.')
    if plan.bits_per_symbol != config.bits_per_symbol:
        raise ConfigError('Frame plan and constellation disagree on L_M.')
    graph = graph or FactorGraph(config)
    key = seed if isinstance(seed, tuple) else (seed,)
    message_bits = codec.message_length(plan.n_c)

    messages = rng.stream(key, rng.MESSAGE).integers(0, 2, (config.K, message_bits))
    labels = segment(interleave(codec.encode(messages), plan), plan.bits_per_symbol)

    n0 = n0_from_snr(snr_db, config.bits_per_symbol, codec.rate)
    fading = np.moveaxis(draw(case, config.K, config.N, plan.uses, key).h, -1, 0)
    received = superimpose(
        config.symbols(labels.T),
        fading,
        noise(config.N, plan.uses, n0, key).T,
        config.mappings,
    )
    detected = graph.run(received, fading, n0, iterations)

    llrs = assemble(np.moveaxis(detected.llrs, 0, 1))
    llrs = deinterleave(np.clip(llrs, -LLR_CLAMP, LLR_CLAMP), plan)
    decoded = codec.decode(llrs)
    bit_errors = np.sum(decoded != messages, axis=1)
    return FrameOutcome(
        bit_errors=bit_errors,
        frame_errors=bit_errors > 0,
        symbol_errors=np.sum(detected.hard.T != labels, axis=1),
        message_bits=message_bits,
    )
