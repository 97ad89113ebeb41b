"""Seeded, parallel Monte Carlo sweeps over SNR."""

import csv
import sys
import time
import traceback
from dataclasses import dataclass, field
from enum import Enum
from multiprocessing import Process, Queue
from queue import Empty as EmptyQueueException

import numpy as np
from scipy.stats import norm
from sortedcontainers import SortedDict

from scmatools import rng
from scmatools.bicm import DEFAULT_FRAME_LENGTH, FramePlan, IdentityCodec, run_coded_frame
from scmatools.channel import ChannelCase, draw, n0_from_snr, noise
from scmatools.constellation import bit_table
from scmatools.detector import FactorGraph, hypotheses, joint_map
from scmatools.errors import ConfigError, WorkerFailure
from scmatools.file_utils import open_stream, write_json
from scmatools.grid import SnrGrid
from scmatools.logger import Logger
from scmatools.scma import superimpose
from scmatools.tally import ErrorTally
from scmatools.utils import result_columns

CONFIDENCE = 0.95
DEFAULT_MIN_ERRORS = 200
DEFAULT_MAX_TRIALS = 10 ** 7
SLOPE_SPAN_DB = 10.0

_metric_names = {'ser': 'symbol', 'ber': 'bit', 'fer': 'frame'}


class Mode(Enum):
    """What a sweep counts and stops on."""

    UNCODED_SYMBOL = 'uncoded-symbol'
    UNCODED_BIT = 'uncoded-bit'
    CODED_FRAME = 'coded-frame'

    @property
    def coded(self):
        """True for the BICM frame mode."""
        return self is Mode.CODED_FRAME

    @property
    def stop_metric(self):
        """Error kind whose count triggers the stopping rule."""
        return {
            Mode.UNCODED_SYMBOL: 'symbol',
            Mode.UNCODED_BIT: 'bit',
            Mode.CODED_FRAME: 'frame',
        }[self]


def default_iterations(size):
    """
    MPA iterations used for a constellation size.

    Parameters:
        size (int): M

    Returns:
        int: 3 for M <= 4, otherwise 5
    """
    return 3 if size <= 4 else 5


@dataclass
class SweepConfig(object):
    """Everything that determines a sweep's output."""

    system: object
    case: ChannelCase
    grid: SnrGrid
    mode: Mode = Mode.UNCODED_SYMBOL
    codec: object = field(default_factory=IdentityCodec)
    min_errors: int = DEFAULT_MIN_ERRORS
    max_trials: int = DEFAULT_MAX_TRIALS
    seed: int = 0
    workers: int = 1
    iterations: int = None
    batch_size: int = None
    frame_length: int = DEFAULT_FRAME_LENGTH
    interleaver_seed: int = 0
    exact: bool = False
    collapse: bool = False
    log_level: str = Logger.silent_level
    provenance: dict = None

    def __post_init__(self):
        """
        Fill defaults and validate.

        Raises:
            ConfigError: A field is out of range or inconsistent
        """
        self.case = ChannelCase.parse(self.case)
        self.mode = Mode(self.mode)
        if not isinstance(self.grid, SnrGrid):
            self.grid = SnrGrid(values=self.grid)
        if self.iterations is None:
            self.iterations = default_iterations(self.system.M)
        if self.batch_size is None:
            self.batch_size = 20 if self.mode.coded else 1000
        for name in ('min_errors', 'max_trials', 'workers', 'iterations', 'batch_size'):
            if getattr(self, name) < 1:
                raise ConfigError(f'{name} must be at least one.')
        if self.seed < 0 or self.interleaver_seed < 0:
            raise ConfigError('Seeds must be non-negative.')
        if self.mode.coded:
            if self.case.uncoded:
                raise ConfigError(
                    f'Case {self.case.value} has one channel use; ' +
                    'use it with an uncoded mode.',
                )
            self.codec.message_length(self.frame_length)
            self.plan()

    def plan(self):
        """
        Frame plan of a coded sweep.

        Returns:
            FramePlan
        """
        return FramePlan.seeded(
            self.frame_length,
            self.system.bits_per_symbol,
            self.interleaver_seed,
        )

    def rate(self):
        """
        Code rate used for the SNR definition.

        Returns:
            float
        """
        return self.codec.rate if self.mode.coded else 1.0

    def new_tally(self):
        """
        Empty tally with this sweep's denominators.

        Returns:
            ErrorTally
        """
        bits = self.system.bits_per_symbol
        if self.mode.coded:
            return ErrorTally(
                self.system.K,
                symbols_per_trial=self.frame_length // bits,
                bits_per_trial=self.codec.message_length(self.frame_length),
            )
        return ErrorTally(self.system.K, bits_per_trial=bits)

    def batches(self):
        """
        Trial count of every batch of a point, in batch order.

        Yields:
            (int, int): batch index and its number of trials
        """
        index = 0
        while index * self.batch_size < self.max_trials:
            yield index, min(self.batch_size, self.max_trials - index * self.batch_size)
            index += 1


def uncoded_batch(cfg, graph, snr_index, snr_db, batch_index, trials):
    """
    Simulate one batch of uncoded channel uses.

    Parameters:
        cfg (SweepConfig): Sweep configuration
        graph (FactorGraph): Detector graph for cfg.system
        snr_index (int): Grid position, part of the stream key
        snr_db (float): Eb/N0 in dB
        batch_index (int): Batch position, part of the stream key
        trials (int): Channel uses in the batch

    Returns:
        ErrorTally
    """
    system = cfg.system
    key = (cfg.seed, snr_index, batch_index)
    n0 = n0_from_snr(snr_db, system.bits_per_symbol)
    labels = rng.stream(key, rng.SYMBOL).integers(0, system.M, (trials, system.K))
    fading = draw(cfg.case, system.K, system.N, 1, key, batch=trials).h[..., 0]
    received = superimpose(
        system.symbols(labels),
        fading,
        noise(system.N, 1, n0, key, batch=trials)[..., 0],
        system.mappings,
    )
    hard = graph.run(received, fading, n0, cfg.iterations).hard
    wrong = hard != labels
    flipped = bit_table(system.bits_per_symbol)[hard ^ labels].sum(axis=-1)
    tally = cfg.new_tally()
    tally.add(trials, wrong.sum(axis=0), flipped.sum(axis=0), wrong.sum(axis=0))
    return tally


def coded_batch(cfg, graph, snr_index, snr_db, batch_index, trials):
    """
    Simulate one batch of coded frames.

    Parameters:
        cfg (SweepConfig): Sweep configuration
        graph (FactorGraph): Detector graph for cfg.system
        snr_index (int): Grid position, part of the stream key
        snr_db (float): Emb/N0 in dB
        batch_index (int): Batch position, part of the stream key
        trials (int): Frames in the batch

    Returns:
        ErrorTally
    """
    plan = cfg.plan()
    tally = cfg.new_tally()
    for frame in range(trials):
        outcome = run_coded_frame(
            cfg.codec,
            plan,
            cfg.system,
            cfg.case,
            snr_db,
            (cfg.seed, snr_index, batch_index, frame),
            cfg.iterations,
            graph=graph,
        )
        tally.add(1, outcome.symbol_errors, outcome.bit_errors, outcome.frame_errors)
    return tally


def simulate_batch(cfg, graph, snr_index, snr_db, batch_index, trials):
    """
    Simulate one batch in the sweep's mode.

    Parameters:
        cfg (SweepConfig): Sweep configuration
        graph (FactorGraph): Detector graph for cfg.system
        snr_index (int): Grid position
        snr_db (float): SNR in dB
        batch_index (int): Batch position
        trials (int): Batch size

    Returns:
        ErrorTally
    """
    if cfg.mode.coded:
        return coded_batch(cfg, graph, snr_index, snr_db, batch_index, trials)
    return uncoded_batch(cfg, graph, snr_index, snr_db, batch_index, trials)


def _graph(cfg):
    return FactorGraph(cfg.system, collapse=cfg.collapse, exact=cfg.exact)


def run(cfg, in_queue, out_queue):
    """
    Worker loop simulating batches until a None task arrives.

    Parameters:
        cfg (SweepConfig): Sweep configuration
        in_queue (Queue): Tasks (snr_index, snr_db, batch_index, trials)
        out_queue (Queue): Results (batch_index, ErrorTally)

    Returns:
        bool: True if the in_queue is exhausted
    """
    try:
        graph = _graph(cfg)
        while True:
            args = in_queue.get()
            if args is None:
                return True
            snr_index, snr_db, batch_index, trials = args
            tally = simulate_batch(cfg, graph, snr_index, snr_db, batch_index, trials)
            out_queue.put((batch_index, tally))
    except Exception as exc:
        if cfg.log_level == Logger.debug_level:
            traceback.print_exception(*sys.exc_info())
        sys.stderr.write(f'[ERROR] ({type(exc)}) {exc}\n')
        sys.exit(1)


def check_dead(processes):
    """
    Look through processes to determine if any have died unexpectedly.

    If any process exited with an error, all other processes are killed.

    Parameters:
        processes (list): Processes to check

    Raises:
        WorkerFailure: A worker died
    """
    for proc in processes:
        if proc.exitcode not in {None, 0}:
            for to_kill in processes:
                to_kill.kill()
            sys.stderr.write('[ERROR] Killing job\n')
            raise WorkerFailure(f'Worker {proc.pid} exited with {proc.exitcode}.')


def monitor(processes, out_queue, chunks):
    """
    Collect the results of dispatched batches.

    Parameters:
        processes (list): Worker processes
        out_queue (Queue): Output of workers
        chunks (int): Number of results to wait for

    Returns:
        SortedDict: batch index to ErrorTally
    """
    results = SortedDict()
    while len(results) < chunks:
        try:
            idx, tally = out_queue.get(block=True, timeout=1)
            results[idx] = tally
        except EmptyQueueException:
            check_dead(processes)
    return results


class InlinePool(object):
    """Runs batches in the calling process."""

    def __init__(self, cfg):
        """
        Create an inline pool.

        Parameters:
            cfg (SweepConfig): Sweep configuration
        """
        self.cfg = cfg
        self.graph = _graph(cfg)

    def __enter__(self):
        """
        Enter the pool context.

        Returns:
            InlinePool
        """
        return self

    def __exit__(self, *exc_info):
        """Nothing to release."""

    def map(self, snr_index, snr_db, batches):
        """
        Simulate a round of batches.

        Parameters:
            snr_index (int): Grid position
            snr_db (float): SNR in dB
            batches (list): (batch_index, trials) pairs

        Returns:
            SortedDict: batch index to ErrorTally
        """
        return SortedDict({
            idx: simulate_batch(self.cfg, self.graph, snr_index, snr_db, idx, trials)
            for idx, trials in batches
        })


class ProcessPool(object):
    """Runs batches on worker processes fed through a queue."""

    def __init__(self, cfg):
        """
        Create a process pool.

        Parameters:
            cfg (SweepConfig): Sweep configuration
        """
        self.cfg = cfg
        self.in_queue = Queue()
        self.out_queue = Queue()
        self.processes = [
            Process(target=run, args=(cfg, self.in_queue, self.out_queue))
            for _ in range(cfg.workers)
        ]

    def __enter__(self):
        """
        Start the workers.

        Returns:
            ProcessPool
        """
        for prc in self.processes:
            prc.start()
        return self

    def __exit__(self, *exc_info):
        """Stop the workers."""
        for _ in self.processes:
            self.in_queue.put(None)
        for prc in self.processes:
            prc.join(timeout=5)
            if prc.is_alive():
                prc.kill()

    def map(self, snr_index, snr_db, batches):
        """
        Simulate a round of batches.

        Parameters:
            snr_index (int): Grid position
            snr_db (float): SNR in dB
            batches (list): (batch_index, trials) pairs

        Returns:
            SortedDict: batch index to ErrorTally
        """
        for idx, trials in batches:
            self.in_queue.put((snr_index, snr_db, idx, trials))
        return monitor(self.processes, self.out_queue, len(batches))


def wilson_interval(errors, trials, confidence=CONFIDENCE):
    """
    Wilson score interval of a binomial proportion.

    Parameters:
        errors (int): Successes of the event counted
        trials (int): Number of Bernoulli trials
        confidence (float): Two-sided confidence level

    Returns:
        tuple: (low, high); (0, 1) when trials is zero
    """
    if trials <= 0:
        return 0.0, 1.0
    z = norm.ppf(0.5 + confidence / 2)
    ratio = errors / trials
    denom = 1 + z * z / trials
    center = (ratio + z * z / (2 * trials)) / denom
    spread = z * np.sqrt(ratio * (1 - ratio) / trials + z * z / (4 * trials * trials))
    spread /= denom
    return float(max(0.0, center - spread)), float(min(1.0, center + spread))


def half_width(errors, trials):
    """
    Half the width of the 95% Wilson interval.

    Parameters:
        errors (int): Error events
        trials (int): Opportunities

    Returns:
        float
    """
    low, high = wilson_interval(errors, trials)
    return (high - low) / 2


@dataclass
class SweepPoint(object):
    """Counts of one SNR point."""

    snr_db: float
    tally: ErrorTally
    wall_time: float

    def row(self):
        """
        CSV record of the point.

        Returns:
            dict keyed by result column
        """
        tally = self.tally
        record = {
            'snr_db': self.snr_db,
            'trials': tally.trials,
            'sym_err': tally['symbol'],
            'bit_err': tally['bit'],
            'frame_err': tally['frame'],
        }
        for rate_name, metric in _metric_names.items():
            record[rate_name] = tally.rate(metric)
            record[f'{rate_name}_ci'] = half_width(tally[metric], tally.denominator(metric))
        return record


def _format(value):
    if isinstance(value, float):
        return f'{value:.12g}'
    return str(value)


class SweepResult(object):
    """Error counts and rates of every SNR point of a sweep."""

    def __init__(self, cfg):
        """
        Create an empty result.

        Parameters:
            cfg (SweepConfig): The configuration that produced it
        """
        self.cfg = cfg
        self.points = []

    def __len__(self):
        """
        Number of finished points.

        Returns:
            int
        """
        return len(self.points)

    def rows(self):
        """
        CSV records of every point.

        Returns:
            list of dict
        """
        return [point.row() for point in self.points]

    def column(self, name):
        """
        One result column over the grid.

        Parameters:
            name (str): Any result column, e.g. 'ser' or 'ber_ci'

        Returns:
            numpy.ndarray
        """
        return np.array([row[name] for row in self.rows()], dtype=float)

    def to_csv(self, path):
        """
        Write the results table.

        Parameters:
            path (str): Destination
        """
        with open_stream(path, 'wt') as stream:
            writer = csv.writer(stream, lineterminator='\n')
            writer.writerow(result_columns)
            for row in self.rows():
                writer.writerow([_format(row[name]) for name in result_columns])

    def to_dict(self):
        """
        JSON mirror with provenance and per-user counts.

        Returns:
            dict
        """
        cfg = self.cfg
        points = []
        for point in self.points:
            record = point.row()
            record['wall_time'] = point.wall_time
            record['per_user'] = {
                metric: point.tally.counts[metric].tolist()
                for metric in point.tally.counts
            }
            points.append(record)
        return {
            'config': cfg.provenance,
            'system': cfg.system.to_dict(),
            'case': cfg.case.value,
            'mode': cfg.mode.value,
            'codec': cfg.codec.to_dict(),
            'iterations': cfg.iterations,
            'seed': cfg.seed,
            'points': points,
        }

    def to_json(self, path):
        """
        Write the JSON mirror.

        Parameters:
            path (str): Destination
        """
        write_json(self.to_dict(), path)


def _stopped(cfg, tally):
    events = tally[cfg.mode.stop_metric]
    return events >= cfg.min_errors or tally.trials >= cfg.max_trials


def _run_point(cfg, pool, snr_index, snr_db, log):
    tally = cfg.new_tally()
    batches = cfg.batches()
    while not _stopped(cfg, tally):
        round_batches = [pair for _, pair in zip(range(cfg.workers), batches)]
        if not round_batches:
            break
        for idx, outcome in pool.map(snr_index, snr_db, round_batches).items():
            tally.merge(outcome)
            log(
                Logger.debug_level,
                'snr={} batch={} trials={} events={}',
                snr_db,
                idx,
                tally.trials,
                tally[cfg.mode.stop_metric],
            )
            if _stopped(cfg, tally):
                break
    return tally


def run_sweep(cfg):
    """
    Run every SNR point until the stopping rule fires.

    Batch b of point i always covers the same trials, drawn from streams
    keyed by (seed, i, b), and batches are folded in index order. Results
    therefore do not depend on the number of workers.

    Parameters:
        cfg (SweepConfig): Sweep configuration

    Returns:
        SweepResult
    """
    log = Logger(cfg.log_level).log
    result = SweepResult(cfg)
    if not len(cfg.grid):
        return result
    pool_class = InlinePool if cfg.workers == 1 else ProcessPool
    with pool_class(cfg) as pool:
        for snr_index, snr_db in cfg.grid.enumerate():
            start = time.perf_counter()
            tally = _run_point(cfg, pool, snr_index, snr_db, log)
            point = SweepPoint(snr_db, tally, time.perf_counter() - start)
            result.points.append(point)
            row = point.row()
            log(
                Logger.info_level,
                'snr={} dB trials={} sym_err={} bit_err={} frame_err={} ' +
                'ser={:.3e} ber={:.3e} fer={:.3e}',
                snr_db,
                row['trials'],
                row['sym_err'],
                row['bit_err'],
                row['frame_err'],
                row['ser'],
                row['ber'],
                row['fer'],
            )
    return result


@dataclass
class Comparison(object):
    """Ordering of several sweeps at one SNR point."""

    metric: str
    snr_db: float
    order: list
    rates: dict
    indistinguishable: dict

    def significant(self, first, second):
        """
        Whether two entries differ beyond their 95% intervals.

        Parameters:
            first (str): Name of one sweep
            second (str): Name of another sweep

        Returns:
            bool
        """
        pair = tuple(sorted((first, second)))
        return not self.indistinguishable[pair]


def _point_stats(result, metric, snr_db):
    if isinstance(result, SweepResult):
        snrs = np.array([point.snr_db for point in result.points])
        rates = result.column(metric)
        widths = result.column(f'{metric}_ci')
    else:
        snrs = result['snr_db'].to_numpy(dtype=float)
        rates = result[metric].to_numpy(dtype=float)
        widths = result[f'{metric}_ci'].to_numpy(dtype=float)
    idx = SnrGrid(values=snrs).index(snr_db)
    return float(rates[idx]), float(widths[idx])


def compare(results, metric, snr_db):
    """
    Order sweeps by an error rate at one SNR.

    Parameters:
        results (dict): Name to SweepResult or result DataFrame
        metric (str): 'ser', 'ber' or 'fer'
        snr_db (float): Point to compare at

    Returns:
        Comparison, best (lowest rate) first; a pair is indistinguishable
        when rate +/- half-width intervals overlap

    Raises:
        GridMismatch: A result lacks the SNR point
        ConfigError: Unknown metric
    """
    if metric not in _metric_names:
        raise ConfigError(f'Unknown metric {metric}; use ser, ber or fer.')
    stats = {name: _point_stats(result, metric, snr_db) for name, result in results.items()}
    order = sorted(stats, key=lambda name: (stats[name][0], name))
    overlap = {}
    names = sorted(stats)
    for pos, first in enumerate(names):
        for second in names[pos + 1:]:
            rate_a, width_a = stats[first]
            rate_b, width_b = stats[second]
            overlap[(first, second)] = abs(rate_a - rate_b) <= width_a + width_b
    return Comparison(
        metric=metric,
        snr_db=snr_db,
        order=order,
        rates={name: stat[0] for name, stat in stats.items()},
        indistinguishable=overlap,
    )


def fit_slope(result, metric='ser', window=None):
    """
    High-SNR slope of an error-rate curve.

    Parameters:
        result (SweepResult): Sweep to fit
        metric (str): 'ser', 'ber' or 'fer'
        window (tuple): (low, high) dB range; the top 10 dB of the grid
            when omitted

    Returns:
        float: dB of SNR per decade of error rate

    Raises:
        ConfigError: Fewer than two points with errors in the window
    """
    snrs = np.array([point.snr_db for point in result.points])
    grid = SnrGrid(values=snrs)
    if window is None:
        chosen = grid.top(SLOPE_SPAN_DB)
    else:
        chosen = grid.window(*window)
    rates = result.column(metric)[chosen]
    snrs = snrs[chosen]
    usable = rates > 0
    if usable.sum() < 2:
        raise ConfigError('Slope fit needs two points with errors.')
    decline, _ = np.polyfit(snrs[usable], np.log10(rates[usable]), 1)
    if decline >= 0:
        raise ConfigError('Error rate does not decrease over the window.')
    return float(-1 / decline)


def oracle_agreement(system, case, snr_db, trials, seed=0, iterations=None, batch_size=1000):
    """
    Fraction of user decisions where Log-MPA matches exhaustive max-log MAP.

    Parameters:
        system (SystemConfig): System with M**K <= 2**20
        case (ChannelCase): Fading case, one channel use per trial
        snr_db (float): Eb/N0 in dB
        trials (int): Channel uses to test
        seed (int): Master seed
        iterations (int): MPA iterations, defaulting by M
        batch_size (int): Channel uses per batch

    Returns:
        float in [0, 1]

    Raises:
        TooLarge: The joint search exceeds the hypothesis guard
    """
    hypotheses(system)
    iterations = iterations or default_iterations(system.M)
    graph = FactorGraph(system)
    n0 = n0_from_snr(snr_db, system.bits_per_symbol)
    agree = 0
    for batch_index, start in enumerate(range(0, trials, batch_size)):
        size = min(batch_size, trials - start)
        key = (seed, 0, batch_index)
        labels = rng.stream(key, rng.SYMBOL).integers(0, system.M, (size, system.K))
        fading = draw(case, system.K, system.N, 1, key, batch=size).h[..., 0]
        received = superimpose(
            system.symbols(labels),
            fading,
            noise(system.N, 1, n0, key, batch=size)[..., 0],
            system.mappings,
        )
        mpa = graph.run(received, fading, n0, iterations).hard
        agree += int(np.sum(mpa == joint_map(received, fading, system, n0).hard))
    return agree / (trials * system.K) if trials else 1.0
