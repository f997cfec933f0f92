__all__ = ['NeighborTable', 'build_neighbors', 'query_pairs', 'brute_force_pairs']

from dataclasses import dataclass
from typing import (Dict, Optional, Tuple)

import numpy as np

# the nine cells around (and including) a cell
_OFFSETS = [(dx, dy) for dx in (-1, 0, 1) for dy in (-1, 0, 1)]


@dataclass
class NeighborTable:
    """
    Fixed-radius neighbour lists in CSR form.

    * ``i``, ``j``, ``dist`` are the pairs, sorted by ``i`` then ``j`` (fixed reduction order for every kernel sum)
    * ``indptr`` so that the neighbours of ``i`` are ``j[indptr[i]:indptr[i+1]]``
    * every particle is its own neighbour and the table is symmetric

    ``within`` derives the table of a smaller radius without searching again,
    so a step searches once at the largest kernel radius.
    """
    n: int
    radius: float
    i: np.ndarray
    j: np.ndarray
    dist: np.ndarray
    indptr: np.ndarray
    _cell_keys: Optional[np.ndarray] = None
    _cell_size: float = 0.

    @classmethod
    def from_pairs(cls, n: int, radius: float, i: np.ndarray, j: np.ndarray, dist: np.ndarray,
                   **kwargs) -> 'NeighborTable':
        order = np.lexsort((j, i))
        i, j, dist = i[order], j[order], dist[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(i, minlength=n), out=indptr[1:])
        return cls(n=n, radius=radius, i=i, j=j, dist=dist, indptr=indptr, **kwargs)

    def neighbors(self, index: int) -> np.ndarray:
        return self.j[self.indptr[index]:self.indptr[index + 1]]

    @property
    def counts(self) -> np.ndarray:
        """Neighbour count per particle, itself included."""
        return np.diff(self.indptr)

    def within(self, radius: float) -> 'NeighborTable':
        if radius > self.radius:
            raise ValueError(f'Cannot derive a {radius} m table from a {self.radius} m one')
        keep = self.dist <= radius
        i, j, dist = self.i[keep], self.j[keep], self.dist[keep]
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(i, minlength=self.n), out=indptr[1:])
        return NeighborTable(n=self.n, radius=radius, i=i, j=j, dist=dist, indptr=indptr)

    @property
    def cells(self) -> Dict[Tuple[int, int], np.ndarray]:
        """The binning used for the search: cell coordinates -> particle indices."""
        if self._cell_keys is None:
            return {}
        table = {}
        for index, key in enumerate(map(tuple, self._cell_keys)):
            table.setdefault(key, []).append(index)
        return {key: np.array(value) for key, value in table.items()}

    def as_lists(self):
        return [self.neighbors(k).tolist() for k in range(self.n)]


def _cell_coordinates(points: np.ndarray, cell_size: float) -> np.ndarray:
    return np.floor(points / cell_size).astype(np.int64)


def query_pairs(queries: np.ndarray, sources: np.ndarray, radius: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    All (query, source) pairs closer than ``radius`` (inclusive) by uniform-cell binning of the sources.
    Cells are ``radius`` wide so only the 3x3 block of cells around a query has to be visited.

    :return: query indices, source indices, distances (unsorted)
    """
    queries = np.asarray(queries, dtype=float).reshape(-1, 2)
    sources = np.asarray(sources, dtype=float).reshape(-1, 2)
    empty = (np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64), np.zeros(0))
    if len(queries) == 0 or len(sources) == 0:
        return empty
    if not radius > 0:
        raise ValueError('radius must be positive')
    source_cells = _cell_coordinates(sources, radius)
    query_cells = _cell_coordinates(queries, radius)
    origin = np.minimum(source_cells.min(axis=0), query_cells.min(axis=0)) - 1
    source_cells -= origin
    query_cells -= origin
    stride = int(max(source_cells[:, 1].max(), query_cells[:, 1].max())) + 2
    source_keys = source_cells[:, 0] * stride + source_cells[:, 1]
    order = np.argsort(source_keys, kind='stable')
    sorted_keys = source_keys[order]
    unique_keys, starts, counts = np.unique(sorted_keys, return_index=True, return_counts=True)
    all_q, all_s = [], []
    for dx, dy in _OFFSETS:
        target = (query_cells[:, 0] + dx) * stride + (query_cells[:, 1] + dy)
        slot = np.searchsorted(unique_keys, target)
        slot = np.minimum(slot, len(unique_keys) - 1)
        found = unique_keys[slot] == target
        q = np.flatnonzero(found)
        if len(q) == 0:
            continue
        start = starts[slot[q]]
        count = counts[slot[q]]
        # expand each query into the range of sorted sources of its cell
        total = int(count.sum())
        offsets = np.repeat(np.cumsum(count) - count, count)
        position = np.arange(total) - offsets + np.repeat(start, count)
        all_q.append(np.repeat(q, count))
        all_s.append(order[position])
    if not all_q:
        return empty
    qi = np.concatenate(all_q)
    si = np.concatenate(all_s)
    delta = queries[qi] - sources[si]
    dist = np.sqrt(delta[:, 0] ** 2 + delta[:, 1] ** 2)
    keep = dist <= radius
    return qi[keep], si[keep], dist[keep]


def build_neighbors(positions: np.ndarray, h: float) -> NeighborTable:
    """
    Exact fixed-radius neighbour lists of a point cloud (same result as the all-pairs search).

    >>> table = build_neighbors(np.array([[0., 0.], [1., 0.]]), h=2.)
    >>> table.neighbors(0)
    array([0, 1])
    """
    positions = np.asarray(positions, dtype=float).reshape(-1, 2)
    n = len(positions)
    if not h > 0:
        raise ValueError('h must be positive')
    i, j, dist = query_pairs(positions, positions, h)
    cell_keys = _cell_coordinates(positions, h) if n else None
    return NeighborTable.from_pairs(n, h, i, j, dist, _cell_keys=cell_keys, _cell_size=h)


def brute_force_pairs(positions: np.ndarray, h: float) -> NeighborTable:
    """All-pairs O(n^2) reference; used by the tests as the oracle."""
    positions = np.asarray(positions, dtype=float).reshape(-1, 2)
    n = len(positions)
    delta = positions[:, None, :] - positions[None, :, :]
    dist = np.sqrt(delta[..., 0] ** 2 + delta[..., 1] ** 2)
    i, j = np.nonzero(dist <= h)
    return NeighborTable.from_pairs(n, h, i.astype(np.int64), j.astype(np.int64), dist[i, j])
