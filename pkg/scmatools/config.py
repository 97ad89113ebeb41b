"""JSON experiment configuration."""

from dataclasses import dataclass, field, fields

import numpy as np

from scmatools.bicm import DEFAULT_FRAME_LENGTH, codec_from_spec
from scmatools.channel import ChannelCase
from scmatools.constellation import resolve
from scmatools.errors import ConfigError, ParseError
from scmatools.file_utils import read_json
from scmatools.grid import SnrGrid
from scmatools.harness import DEFAULT_MAX_TRIALS, DEFAULT_MIN_ERRORS, Mode, SweepConfig
from scmatools.logger import Logger
from scmatools.scma import IndicatorMatrix, SystemConfig, canonical_indicator, full_load_indicator

_required = ('constellation', 'case', 'snr_db')


def _integer(document, key, default):
    value = document.get(key, default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f'{key} must be an integer, got {value!r}.')
    return value


def _flag(document, key):
    value = document.get(key, False)
    if not isinstance(value, bool):
        raise ConfigError(f'{key} must be true or false, got {value!r}.')
    return value


def _grid(value):
    if isinstance(value, str):
        return SnrGrid(string=value)
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return SnrGrid(values=[value])
    if isinstance(value, list):
        return SnrGrid(values=value)
    raise ConfigError(f'snr_db must be a list or a "start:stop:step" string, got {value!r}.')


def _indicator(value):
    if value == 'canonical':
        return canonical_indicator()
    if isinstance(value, dict) and set(value) == {'N', 'dv'}:
        return full_load_indicator(value['N'], value['dv'])
    if isinstance(value, list):
        return IndicatorMatrix(value)
    raise ConfigError(
        f'indicator must be "canonical", {{"N": n, "dv": d}} or a matrix, got {value!r}.',
    )


def _rotation(value, dims):
    if value is None:
        return None
    try:
        phases = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f'rotation phases must be numbers, got {value!r}.') from exc
    if phases.shape != (dims,) or not np.all(np.isfinite(phases)):
        raise ConfigError(f'rotation needs {dims} phases, got {value!r}.')
    return np.exp(1j * phases)


@dataclass
class ExperimentConfig(object):
    """A validated experiment document."""

    constellation: str
    case: ChannelCase
    grid: SnrGrid
    mode: Mode = Mode.UNCODED_SYMBOL
    codec: dict = field(default_factory=lambda: {'type': 'identity'})
    seed: int = 0
    min_errors: int = DEFAULT_MIN_ERRORS
    max_trials: int = DEFAULT_MAX_TRIALS
    iterations: int = None
    indicator: object = 'canonical'
    rotation: list = None
    frame_length: int = DEFAULT_FRAME_LENGTH
    interleaver_seed: int = 0
    batch_size: int = None
    exact: bool = False
    collapse: bool = False
    workers: int = 1
    document: dict = None

    @classmethod
    def from_dict(cls, document):
        """
        Validate a configuration document.

        Parameters:
            document (dict): Parsed JSON

        Returns:
            ExperimentConfig

        Raises:
            ConfigError: Missing, unknown or mistyped keys
        """
        if not isinstance(document, dict):
            raise ConfigError('Configuration must be a JSON object.')
        known = {item.name for item in fields(cls)} - {'grid', 'document'} | {'snr_db'}
        unknown = sorted(set(document) - known)
        if unknown:
            raise ConfigError(f'Unknown configuration key: {unknown[0]}.')
        missing = [key for key in _required if key not in document]
        if missing:
            raise ConfigError(f'Missing configuration key: {missing[0]}.')
        if not isinstance(document['constellation'], str):
            raise ConfigError('constellation must be a name or a path.')
        try:
            mode = Mode(document.get('mode', Mode.UNCODED_SYMBOL.value))
        except ValueError as exc:
            choices = ', '.join(item.value for item in Mode)
            raise ConfigError(f"Unknown mode {document['mode']}; use one of {choices}.") from exc
        codec = document.get('codec', {'type': 'identity'})
        codec_from_spec(codec)
        return cls(
            constellation=document['constellation'],
            case=ChannelCase.parse(document['case']),
            grid=_grid(document['snr_db']),
            mode=mode,
            codec=codec,
            seed=_integer(document, 'seed', 0),
            min_errors=_integer(document, 'min_errors', DEFAULT_MIN_ERRORS),
            max_trials=_integer(document, 'max_trials', DEFAULT_MAX_TRIALS),
            iterations=_integer(document, 'iterations', None),
            indicator=document.get('indicator', 'canonical'),
            rotation=document.get('rotation'),
            frame_length=_integer(document, 'frame_length', DEFAULT_FRAME_LENGTH),
            interleaver_seed=_integer(document, 'interleaver_seed', 0),
            batch_size=_integer(document, 'batch_size', None),
            exact=_flag(document, 'exact'),
            collapse=_flag(document, 'collapse'),
            workers=_integer(document, 'workers', 1),
            document=document,
        )

    def system(self):
        """
        Build the system the experiment runs on.

        Returns:
            SystemConfig

        Raises:
            ConfigError: The indicator or rotation is malformed
            UnknownName: The constellation cannot be resolved
        """
        indicator = _indicator(self.indicator)
        mother = resolve(self.constellation)
        rotation = _rotation(self.rotation, mother.dv)
        rotations = None if rotation is None else [rotation] * indicator.K
        return SystemConfig(indicator, mother, rotations)

    def to_sweep(self, workers=None, log_level=Logger.silent_level):
        """
        Turn the experiment into a sweep configuration.

        Parameters:
            workers (int): Overrides the document's worker count
            log_level (str): Logger level of the sweep

        Returns:
            SweepConfig
        """
        return SweepConfig(
            system=self.system(),
            case=self.case,
            grid=self.grid,
            mode=self.mode,
            codec=codec_from_spec(self.codec),
            min_errors=self.min_errors,
            max_trials=self.max_trials,
            seed=self.seed,
            workers=workers or self.workers,
            iterations=self.iterations,
            batch_size=self.batch_size,
            frame_length=self.frame_length,
            interleaver_seed=self.interleaver_seed,
            exact=self.exact,
            collapse=self.collapse,
            log_level=log_level,
            provenance=self.document,
        )


def load_config(config_path):
    """
    Load a JSON experiment file.

    Parameters:
        config_path (str): Path to the JSON document

    Returns:
        ExperimentConfig

    Raises:
        ConfigError: The file cannot be read or fails validation
    """
    try:
        document = read_json(config_path)
    except ParseError as exc:
        raise ConfigError(f'Unable to read config file: {exc}') from exc
    return ExperimentConfig.from_dict(document)
