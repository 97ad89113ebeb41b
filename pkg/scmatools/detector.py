"""Log-domain message passing detection and an exhaustive joint MAP oracle."""

from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy.special import logsumexp

from scmatools.constellation import bit_table
from scmatools.errors import InvalidConfig, InvalidN0, NonFinite, TooLarge

MESSAGE_FLOOR = -700.0
JOINT_GUARD = 2 ** 20
_joint_block = 2 ** 18


@dataclass(frozen=True)
class ProjectionTable(object):
    """Distinct values one user places on one RE."""

    re: int
    values: np.ndarray
    index: np.ndarray

    @property
    def members(self):
        """Symbols sharing each distinct value."""
        return [np.flatnonzero(self.index == value) for value in range(len(self.values))]


@dataclass
class DetectionResult(object):
    """Per-user soft and hard outputs of one detection call."""

    log_marginals: np.ndarray
    hard: np.ndarray
    llrs: np.ndarray


@dataclass
class JointResult(object):
    """Exhaustive per-user marginals."""

    exact: np.ndarray
    max_log: np.ndarray
    hard: np.ndarray


def collapse_projections(constellation, F):  # noqa:N803
    """
    Distinct projected values of a user on each of its REs.

    Parameters:
        constellation (MultiDimConstellation): The user's constellation
        F (MappingMatrix): The user's mapping

    Returns:
        list: One ProjectionTable per occupied RE, in dimension order
    """
    tables = []
    for dim, re in enumerate(F.rows):
        values, index = np.unique(constellation.points[:, dim], return_inverse=True)
        tables.append(ProjectionTable(int(re), values, index.reshape(-1)))
    return tables


def _max(values, axis):
    return np.max(values, axis=axis)


def _normalize(messages):
    shifted = messages - messages.max(axis=-1, keepdims=True)
    return np.maximum(shifted, MESSAGE_FLOOR)


def _squared_magnitude(values):
    return values.real * values.real + values.imag * values.imag


def _batched(y, h, config):
    y = np.asarray(y, dtype=complex)
    h = np.asarray(h, dtype=complex)
    single = y.ndim == 1
    if single:
        y = y[None]
        h = h[None]
    if y.ndim != 2 or y.shape[1] != config.N:
        raise InvalidConfig(f'Observation of shape {y.shape} for N={config.N}.')
    if h.shape != (len(y), config.K, config.N):
        raise InvalidConfig(
            f'Channel of shape {h.shape} for {len(y)} trials, ' +
            f'K={config.K}, N={config.N}.',
        )
    return y, h, single


def _check_n0(n0):
    if not np.isfinite(n0) or n0 <= 0:
        raise InvalidN0(f'N0 must be positive, got {n0}.')


class FactorGraph(object):
    """Users and REs of a system joined by its indicator matrix."""

    def __init__(self, config, collapse=False, exact=False):
        """
        Build the graph and its per-edge value tables.

        Parameters:
            config (SystemConfig): System under detection
            collapse (bool): Merge symbols sharing a projected value
            exact (bool): Use log-sum-exp instead of max in every update
        """
        self.config = config
        self.exact = exact
        self.collapse = collapse
        self._reduce = logsumexp if exact else _max
        self.edge_re = config.user_res
        self.edge_slot = np.array([
            [int(np.flatnonzero(config.re_users[re] == user)[0]) for re in res]
            for user, res in enumerate(config.user_res)
        ])
        self.tables = self._build_tables()
        self._members = [[table.members for table in row] for row in self.tables]
        self._bits = bit_table(config.bits_per_symbol)

    @property
    def edges(self):
        """Number of user-RE edges."""
        return self.config.K * self.config.dv

    def _build_tables(self):
        config = self.config
        if self.collapse:
            per_user = [
                collapse_projections(const, mapping)
                for const, mapping in zip(config.constellations, config.mappings)
            ]
            return [
                [
                    per_user[user][int(np.flatnonzero(config.user_res[user] == re)[0])]
                    for user in config.re_users[re]
                ]
                for re in range(config.N)
            ]
        full = config.re_table()
        identity = np.arange(config.M)
        return [
            [ProjectionTable(re, full[re, slot], identity) for slot in range(config.dc)]
            for re in range(config.N)
        ]

    def _axis_shape(self, trials, slot, size):
        shape = [trials] + [1] * self.config.dc
        shape[slot + 1] = size
        return shape

    def _metrics(self, y, h, n0):
        trials = len(y)
        dc = self.config.dc
        metrics = []
        for re, row in enumerate(self.tables):
            clean = np.zeros([trials] + [len(table.values) for table in row], dtype=complex)
            for slot, (user, table) in enumerate(zip(self.config.re_users[re], row)):
                term = h[:, user, re][:, None] * table.values[None, :]
                clean = clean + term.reshape(self._axis_shape(trials, slot, -1))
            diff = y[:, re].reshape((trials,) + (1,) * dc) - clean
            metrics.append(-_squared_magnitude(diff) / n0)
        return metrics

    def _class_messages(self, messages, re, slot):
        members = self._members[re][slot]
        if len(members) == messages.shape[-1]:
            return messages[:, np.concatenate(members)]
        return np.stack([
            self._reduce(messages[:, group], axis=1) for group in members
        ], axis=1)

    def _function_update(self, metrics, q):
        trials = len(q)
        dc = self.config.dc
        fv = np.empty_like(q)
        for re, row in enumerate(self.tables):
            classes = [self._class_messages(q[:, re, slot], re, slot) for slot in range(dc)]
            for slot, table in enumerate(row):
                acc = metrics[re]
                for other in range(dc):
                    if other != slot:
                        shape = self._axis_shape(trials, other, -1)
                        acc = acc + classes[other].reshape(shape)
                axes = tuple(axis + 1 for axis in range(dc) if axis != slot)
                reduced = self._reduce(acc, axis=axes) if axes else acc
                fv[:, re, slot] = reduced[:, table.index]
        return _normalize(fv)

    def _incoming(self, fv):
        return fv[:, self.edge_re, self.edge_slot]

    def _variable_update(self, fv):
        incoming = self._incoming(fv)
        q = np.zeros_like(fv)
        dv = self.config.dv
        for dim in range(dv):
            total = np.zeros(incoming.shape[:2] + incoming.shape[3:])
            for other in range(dv):
                if other != dim:
                    total = total + incoming[:, :, other]
            q[:, self.edge_re[:, dim], self.edge_slot[:, dim]] = _normalize(total)
        return q

    def _marginals(self, fv):
        incoming = self._incoming(fv)
        total = np.zeros(incoming.shape[:2] + incoming.shape[3:])
        for dim in range(self.config.dv):
            total = total + incoming[:, :, dim]
        return total - total.max(axis=-1, keepdims=True)

    def llrs(self, marginals):
        """
        Bit LLRs from symbol log-marginals.

        Parameters:
            marginals (numpy.ndarray): (..., M) log-marginals

        Returns:
            numpy.ndarray of shape (..., L_M); positive favors bit 0
        """
        columns = []
        for bit in range(self._bits.shape[1]):
            zero = marginals[..., self._bits[:, bit] == 0]
            one = marginals[..., self._bits[:, bit] == 1]
            columns.append(self._reduce(zero, axis=-1) - self._reduce(one, axis=-1))
        return np.stack(columns, axis=-1)

    def run(self, y, h, n0, iterations):
        """
        Flooding-schedule message passing on a batch of observations.

        Parameters:
            y (numpy.ndarray): (T, N) received vectors
            h (numpy.ndarray): (T, K, N) channel coefficients
            n0 (float): Noise density
            iterations (int): Function-node updates, at least one

        Returns:
            DetectionResult with a leading trial axis

        Raises:
            InvalidConfig: iterations < 1
            NonFinite: A message became NaN or infinite
        """
        if iterations < 1:
            raise InvalidConfig(f'iterations={iterations} must be at least one.')
        metrics = self._metrics(y, h, n0)
        shape = (len(y), self.config.N, self.config.dc, self.config.M)
        q = np.zeros(shape)
        for step in range(iterations):
            fv = self._function_update(metrics, q)
            if not np.all(np.isfinite(fv)):
                raise NonFinite(f'Non-finite message in iteration {step + 1}.')
            if step < iterations - 1:
                q = self._variable_update(fv)
        marginals = self._marginals(fv)
        return DetectionResult(
            log_marginals=marginals,
            hard=np.argmax(marginals, axis=-1),
            llrs=self.llrs(marginals),
        )


def detect(y, h, config, n0, iterations, exact=False, collapse=False):
    """
    Log-MPA multi-user detection.

    Parameters:
        y (array_like): (N,) or (T, N) received vectors
        h (array_like): (K, N) or (T, K, N) channel coefficients
        config (SystemConfig): System configuration
        n0 (float): Noise density
        iterations (int): Message passing iterations
        exact (bool): Log-sum-exp updates instead of max-log
        collapse (bool): Work on distinct projected values

    Returns:
        DetectionResult, without a trial axis for unbatched input

    Raises:
        InvalidConfig: Shapes disagree with the configuration
        InvalidN0: n0 is not positive
        NonFinite: Messages overflowed or inputs were not finite
    """
    _check_n0(n0)
    y, h, single = _batched(y, h, config)
    result = FactorGraph(config, collapse=collapse, exact=exact).run(y, h, n0, iterations)
    if single:
        return DetectionResult(
            result.log_marginals[0],
            result.hard[0],
            result.llrs[0],
        )
    return result


def hypotheses(config):
    """
    Every joint symbol tuple in row-major order.

    Parameters:
        config (SystemConfig): System configuration

    Returns:
        numpy.ndarray of shape (M**K, K)

    Raises:
        TooLarge: M**K exceeds 2**20
    """
    count = config.M ** config.K
    if count > JOINT_GUARD:
        raise TooLarge(
            f'{config.M}**{config.K} = {count} hypotheses exceeds {JOINT_GUARD}.',
        )
    return np.array(list(product(range(config.M), repeat=config.K)))


def joint_map(y, h, config, n0):
    """
    Exhaustive per-user marginalization of the joint likelihood.

    Parameters:
        y (array_like): (N,) or (T, N) received vectors
        h (array_like): (K, N) or (T, K, N) channel coefficients
        config (SystemConfig): System configuration
        n0 (float): Noise density

    Returns:
        JointResult; `exact` uses log-sum-exp and `max_log` uses max, both
        normalized to a maximum of zero

    Raises:
        TooLarge: M**K exceeds 2**20
        InvalidConfig: Shapes disagree with the configuration
    """
    _check_n0(n0)
    tuples = hypotheses(config)
    y, h, single = _batched(y, h, config)
    codebooks = config.codebooks()
    chosen = codebooks[np.arange(config.K), tuples]
    grid = (len(y),) + (config.M,) * config.K
    exact = np.empty((len(y), config.K, config.M))
    max_log = np.empty_like(exact)
    step = max(1, _joint_block // len(tuples))
    for start in range(0, len(y), step):
        stop = min(start + step, len(y))
        clean = np.einsum('tkn,hkn->thn', h[start:stop], chosen)
        diff = y[start:stop, None, :] - clean
        metric = -np.sum(_squared_magnitude(diff), axis=-1) / n0
        metric = metric.reshape((stop - start,) + grid[1:])
        for user in range(config.K):
            axes = tuple(axis + 1 for axis in range(config.K) if axis != user)
            exact[start:stop, user] = logsumexp(metric, axis=axes) if axes else metric
            max_log[start:stop, user] = np.max(metric, axis=axes) if axes else metric
    exact -= exact.max(axis=-1, keepdims=True)
    max_log -= max_log.max(axis=-1, keepdims=True)
    result = JointResult(exact, max_log, np.argmax(max_log, axis=-1))
    if single:
        return JointResult(result.exact[0], result.max_log[0], result.hard[0])
    return result
