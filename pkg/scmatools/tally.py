"""Per-user error counters for Monte Carlo sweeps."""

import numpy as np

metrics = ('symbol', 'bit', 'frame')


class ErrorTally(object):
    """Tracks symbol, bit and frame errors of every user."""

    def __init__(self, users, symbols_per_trial=1, bits_per_trial=1):
        """
        Create an empty tally.

        Parameters:
            users (int): K
            symbols_per_trial (int): Symbols each user sends per trial
            bits_per_trial (int): Bits each user sends per trial
        """
        self.users = users
        self.symbols_per_trial = symbols_per_trial
        self.bits_per_trial = bits_per_trial
        self.trials = 0
        self.counts = {metric: np.zeros(users, dtype=np.int64) for metric in metrics}

    def __len__(self):
        """
        Number of trials.

        Returns:
            int
        """
        return self.trials

    def __getitem__(self, metric):
        """
        Errors of one kind summed over users.

        Parameters:
            metric (str): symbol, bit or frame

        Returns:
            int
        """
        return int(self.counts[metric].sum())

    def __iter__(self):
        """
        Iterate over the summed counts.

        Returns:
            iterator
        """
        return (self[metric] for metric in metrics)

    def add(self, trials, symbol, bit, frame):
        """
        Record a block of trials.

        Parameters:
            trials (int): Trials in the block
            symbol (array_like): Symbol errors per user
            bit (array_like): Bit errors per user
            frame (array_like): Frame errors per user
        """
        self.trials += int(trials)
        for metric, errors in zip(metrics, (symbol, bit, frame)):
            self.counts[metric] += np.asarray(errors, dtype=np.int64)

    def merge(self, other):
        """
        Add another tally's counts into this one.

        Parameters:
            other (ErrorTally): Tally over the same users
        """
        self.add(
            other.trials,
            other.counts['symbol'],
            other.counts['bit'],
            other.counts['frame'],
        )

    def denominator(self, metric):
        """
        Number of opportunities for an error of one kind.

        Parameters:
            metric (str): symbol, bit or frame

        Returns:
            int
        """
        per_trial = {
            'symbol': self.symbols_per_trial,
            'bit': self.bits_per_trial,
            'frame': 1,
        }[metric]
        return self.trials * self.users * per_trial

    def rate(self, metric):
        """
        Error rate over all users.

        Parameters:
            metric (str): symbol, bit or frame

        Returns:
            float, zero when no trials ran
        """
        total = self.denominator(metric)
        return self[metric] / total if total else 0.0
