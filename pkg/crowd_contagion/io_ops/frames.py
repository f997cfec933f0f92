__all__ = ['FrameRecord', 'FRAME_COLUMNS', 'write_frame', 'read_frame', 'frame_path', 'list_frames',
           'write_table', 'read_table', 'eikonal_table', 'round_significant']

import os
import re
from dataclasses import dataclass
from typing import List

import numpy as np
import pandas as pd

from ..contagion.fractions import classify_array, LABELS
from ..eikonal.boundary import KIND_NAMES

FRAME_COLUMNS = ['id', 'pop', 'alive', 'x', 'y', 'ux', 'uy', 'rho', 'alpha_S', 'alpha_E', 'alpha_I', 'label']
FLOAT_FORMAT = '%.12g'


def round_significant(values: np.ndarray, digits: int = 12) -> np.ndarray:
    """Values as they read back from a ``%.12g`` text file."""
    values = np.asarray(values, dtype=float)
    return np.array([float(f'{v:.{digits}g}') for v in values.ravel()]).reshape(values.shape)


@dataclass
class FrameRecord:
    """
    The particles at time ``t``: one row per seeded particle, dead ones with ``alive = 0``.
    Numbers are kept at 12 significant digits, the precision of the text files,
    so writing and reading a frame gives back the same values.
    """
    t: float
    table: pd.DataFrame

    @classmethod
    def from_cloud(cls, cloud, t: float, threshold: float = 0.05) -> 'FrameRecord':
        labels = np.array(LABELS)[classify_array(cloud.alpha, threshold)] if cloud.n else np.array([], dtype=str)
        table = pd.DataFrame({'id': cloud.ids,
                              'pop': [cloud.pop_ids[k] for k in cloud.pop],
                              'alive': cloud.alive.astype(int),
                              'x': round_significant(cloud.x[:, 0]),
                              'y': round_significant(cloud.x[:, 1]),
                              'ux': round_significant(cloud.u[:, 0]),
                              'uy': round_significant(cloud.u[:, 1]),
                              'rho': round_significant(cloud.rho),
                              'alpha_S': round_significant(cloud.alpha[:, 0]),
                              'alpha_E': round_significant(cloud.alpha[:, 1]),
                              'alpha_I': round_significant(cloud.alpha[:, 2]),
                              'label': labels},
                             columns=FRAME_COLUMNS)
        return cls(t=float(round_significant(t)), table=table)

    @property
    def alive(self) -> pd.DataFrame:
        return self.table.loc[self.table.alive == 1]

    def __len__(self):
        return len(self.table)


def frame_path(directory: str, index: int) -> str:
    return os.path.join(directory, 'frames', f'frame_{index:05d}.csv')


def list_frames(directory: str) -> List[str]:
    folder = os.path.join(directory, 'frames')
    if not os.path.isdir(folder):
        return []
    return [os.path.join(folder, fn) for fn in sorted(os.listdir(folder)) if re.match(r'frame_\d+\.csv$', fn)]


def write_frame(record: FrameRecord, path: str) -> None:
    """Comma-separated text with a ``t`` column in front of the particle columns."""
    table = record.table.copy()
    table.insert(0, 't', record.t)
    table.to_csv(path, index=False, float_format=FLOAT_FORMAT)


def read_frame(path: str) -> FrameRecord:
    table = pd.read_csv(path, float_precision='round_trip', dtype={'pop': str, 'label': str})
    missing = set(['t'] + FRAME_COLUMNS) - set(table.columns)
    if missing:
        raise ValueError(f'{path} is not a frame file, missing {sorted(missing)}')
    t = float(table.t.iloc[0]) if len(table) else float('nan')
    return FrameRecord(t=t, table=table[FRAME_COLUMNS].reset_index(drop=True))


def write_table(rows: List[dict], path: str, columns: List[str] = None) -> pd.DataFrame:
    """Summary, exposure and trajectory series."""
    table = pd.DataFrame(rows, columns=columns)
    table.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return table


def read_table(path: str) -> pd.DataFrame:
    return pd.read_csv(path, float_precision='round_trip')


def eikonal_table(field) -> pd.DataFrame:
    """Nodes of a solved field with their kind, travel cost and descent (zero off the descent rows)."""
    descent = np.zeros((len(field.nodes), 2))
    descent[field.rows] = field.descent
    return pd.DataFrame({'x': field.nodes[:, 0], 'y': field.nodes[:, 1],
                         'kind': np.asarray(KIND_NAMES)[field.kinds], 'phi': field.phi,
                         'dx': descent[:, 0], 'dy': descent[:, 1]})
