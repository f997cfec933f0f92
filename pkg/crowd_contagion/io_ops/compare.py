__all__ = ['compare_runs', 'read_exposure']

import os

import numpy as np
import pandas as pd

from .frames import read_table


def read_exposure(run_dir: str) -> pd.DataFrame:
    """The ``(t, percent)`` series of a run directory."""
    path = os.path.join(run_dir, 'exposure.csv')
    if not os.path.exists(path):
        raise FileNotFoundError(f'{run_dir} has no exposure.csv (is it a run directory?)')
    return read_table(path)


def compare_runs(dir_a: str, dir_b: str) -> pd.DataFrame:
    """
    Exposed percentage of two runs side by side, on their common output times.

    ``ratio`` is ``exposed_a / exposed_b`` (1 when both are zero, ``inf`` when only b is),
    ``a_dominates`` / ``b_dominates`` flag the times where one is strictly above the other.

    :raises ValueError: the runs were not written at the same times
    """
    a = read_exposure(dir_a)
    b = read_exposure(dir_b)
    if len(a) != len(b) or not np.array_equal(a.t.values, b.t.values):
        raise ValueError(f'{dir_a} and {dir_b} have different output times: '
                         f'{len(a)} frames up to {a.t.max()} s vs {len(b)} up to {b.t.max()} s')
    exposed_a = a.percent.values.astype(float)
    exposed_b = b.percent.values.astype(float)
    with np.errstate(divide='ignore', invalid='ignore'):
        ratio = np.where(exposed_b != 0, exposed_a / exposed_b, np.where(exposed_a == 0, 1., np.inf))
    return pd.DataFrame({'t': a.t.values,
                         'exposed_a': exposed_a,
                         'exposed_b': exposed_b,
                         'ratio': ratio,
                         'a_dominates': exposed_a > exposed_b,
                         'b_dominates': exposed_b > exposed_a})
