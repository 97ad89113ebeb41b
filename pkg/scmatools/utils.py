"""Miscellaneous utility functions."""

import os
import socket

import pandas as pd

from scmatools.errors import ParseError

result_columns = (
    'snr_db',
    'trials',
    'sym_err',
    'bit_err',
    'frame_err',
    'ser',
    'ber',
    'fer',
    'ser_ci',
    'ber_ci',
    'fer_ci',
)


def get_hostname_string():
    """
    Retrieve the machine hostname, ip, and proccess ID.

    Returns:
        String in the format "hostname|ip|pid"
    """
    hostname = socket.gethostname()
    try:
        ip_addr = socket.gethostbyname(hostname)
    except OSError:
        ip_addr = '-'
    pid = os.getpid()
    return f'{hostname}|{ip_addr}|{pid}'


def load_results(file_path):
    """
    Read a sweep result CSV back into a DataFrame.

    Parameters:
        file_path (str): Path written by `SweepResult.to_csv`

    Returns:
        pandas.DataFrame

    Raises:
        ParseError: The file is unreadable or lacks result columns
    """
    try:
        data = pd.read_csv(file_path)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise ParseError(f'Unable to read results file: {exc}') from exc
    missing = [col for col in result_columns if col not in data.columns]
    if missing:
        raise ParseError(f"Missing required columns: {', '.join(missing)}")
    return data
