__all__ = ['LsqStencil', 'StencilRow', 'build_stencils', 'build_stencil', 'gradient', 'divergence',
           'gradient_at', 'choose_lsq_radius', 'weight', 'WEIGHT_ALPHA']

import logging
from dataclasses import dataclass
from typing import (Optional, Tuple)

import numpy as np
from scipy import sparse

from .neighbors import NeighborTable, query_pairs

log = logging.getLogger(__name__)

# w(h) = 1e-2
WEIGHT_ALPHA = np.log(100.)
CONDITION_LIMIT = 1e10
WIDEN_FACTOR = 1.5
WIDEN_ATTEMPTS = 3


def weight(r: np.ndarray, h: float) -> np.ndarray:
    """Gaussian least-squares weight exp(-alpha r^2 / h^2)."""
    return np.exp(-WEIGHT_ALPHA * (np.asarray(r) / h) ** 2)


@dataclass
class StencilRow:
    """Derivative coefficients of one particle: d/dx f_i = sum(cx * f[indices])."""
    index: int
    indices: np.ndarray
    cx: np.ndarray
    cy: np.ndarray
    degenerate: bool


@dataclass
class LsqStencil:
    """
    Weighted least-squares derivative operators on a point cloud, stored as two sparse matrices
    (rows: the requested particles, columns: the whole cloud).

    * ``degenerate`` rows needed a fallback (wider radius or a copied neighbour row)
    * ``failed`` rows have no usable stencil at all and give zero derivatives
    """
    rows: np.ndarray
    dx: sparse.csr_matrix
    dy: sparse.csr_matrix
    h: float
    degenerate: np.ndarray
    failed: np.ndarray

    def row(self, k: int) -> StencilRow:
        start, end = self.dx.indptr[k], self.dx.indptr[k + 1]
        ystart, yend = self.dy.indptr[k], self.dy.indptr[k + 1]
        indices = self.dx.indices[start:end]
        cy = dict(zip(self.dy.indices[ystart:yend], self.dy.data[ystart:yend]))
        return StencilRow(index=int(self.rows[k]),
                          indices=indices.copy(),
                          cx=self.dx.data[start:end].copy(),
                          cy=np.array([cy.get(c, 0.) for c in indices]),
                          degenerate=bool(self.degenerate[k]))


def _basis(offsets: np.ndarray, order: int) -> np.ndarray:
    dx, dy = offsets[:, 0], offsets[:, 1]
    if order == 1:
        return np.stack([dx, dy], axis=1)
    return np.stack([dx, dy, dx ** 2 / 2, dx * dy, dy ** 2 / 2], axis=1)


def _fit_rows(positions: np.ndarray, row_ids: np.ndarray, qi: np.ndarray, j: np.ndarray, h: float, order: int,
              min_neighbors: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Local Taylor fits f_j - f_i = P(x_j - x_i) . c for the rows ``row_ids``.
    ``qi`` indexes ``row_ids``, ``j`` the cloud. Self pairs must already be dropped.

    :return: valid mask per row, pair row, pair column, pair coefficients (n_pairs, 2) of valid rows only
    """
    n_rows = len(row_ids)
    k = 2 if order == 1 else 5
    counts = np.bincount(qi, minlength=n_rows)
    offsets = (positions[j] - positions[row_ids[qi]]) / h
    w = np.exp(-WEIGHT_ALPHA * (offsets ** 2).sum(axis=1))
    basis = _basis(offsets, order)
    moments = np.zeros((n_rows, k, k))
    for a in range(k):
        for b in range(a, k):
            moments[:, a, b] = np.bincount(qi, weights=w * basis[:, a] * basis[:, b], minlength=n_rows)
            moments[:, b, a] = moments[:, a, b]
    valid = counts >= min_neighbors
    if valid.any():
        cond = np.full(n_rows, np.inf)
        cond[valid] = np.linalg.cond(moments[valid])
        valid &= cond < CONDITION_LIMIT
    moments[~valid] = np.eye(k)
    inverse = np.linalg.inv(moments)
    keep = valid[qi]
    qk = qi[keep]
    # gradient rows of the inverse applied to the weighted basis vector of each pair
    coeff = np.einsum('pab,pb->pa', inverse[qk, :2, :], basis[keep]) * (w[keep] / h)[:, None]
    return valid, qk, j[keep], coeff


def _pairs_for(positions: np.ndarray, row_ids: np.ndarray, h: float, table: Optional[NeighborTable]):
    if table is not None and table.radius >= h:
        lookup = np.full(table.n, -1, dtype=np.int64)
        lookup[row_ids] = np.arange(len(row_ids))
        keep = (lookup[table.i] >= 0) & (table.dist <= h) & (table.i != table.j)
        return lookup[table.i[keep]], table.j[keep]
    qi, j, _ = query_pairs(positions[row_ids], positions, h)
    keep = row_ids[qi] != j
    return qi[keep], j[keep]


def build_stencils(positions: np.ndarray, h: float, rows: Optional[np.ndarray] = None,
                   table: Optional[NeighborTable] = None, order: int = 1,
                   min_neighbors: Optional[int] = None) -> LsqStencil:
    """
    Least-squares gradient stencils for ``rows`` (default: every point) of the cloud ``positions``.

    Rows with too few neighbours or a rank-deficient normal matrix are refitted with the radius widened
    by 1.5 up to three times, then copy the row of the nearest valid particle.
    """
    positions = np.asarray(positions, dtype=float).reshape(-1, 2)
    n = len(positions)
    rows = np.arange(n) if rows is None else np.asarray(rows, dtype=np.int64)
    if min_neighbors is None:
        min_neighbors = 5 if order == 1 else 8
    n_rows = len(rows)
    pair_row, pair_col, pair_cx, pair_cy = [], [], [], []
    valid = np.zeros(n_rows, dtype=bool)
    pending = np.arange(n_rows)
    widened_first = np.zeros(n_rows, dtype=bool)
    radius = h
    for attempt in range(WIDEN_ATTEMPTS + 1):
        if len(pending) == 0:
            break
        qi, j = _pairs_for(positions, rows[pending], radius, table)
        ok, qk, jk, coeff = _fit_rows(positions, rows[pending], qi, j, radius, order, min_neighbors)
        local_row = pending[qk]
        pair_row.append(local_row)
        pair_col.append(jk)
        pair_cx.append(coeff[:, 0])
        pair_cy.append(coeff[:, 1])
        valid[pending[ok]] = True
        if attempt == 0:
            widened_first = np.ones(n_rows, dtype=bool)
            widened_first[pending[ok]] = False
        pending = pending[~ok]
        radius *= WIDEN_FACTOR
    degenerate = np.zeros(n_rows, dtype=bool)
    failed = np.zeros(n_rows, dtype=bool)
    row = np.concatenate(pair_row) if pair_row else np.zeros(0, dtype=np.int64)
    col = np.concatenate(pair_col) if pair_col else np.zeros(0, dtype=np.int64)
    cx = np.concatenate(pair_cx) if pair_cx else np.zeros(0)
    cy = np.concatenate(pair_cy) if pair_cy else np.zeros(0)
    # the self coefficient makes every row annihilate constants
    diag_row = np.flatnonzero(valid)
    diag_cx = -np.bincount(row, weights=cx, minlength=n_rows)[diag_row]
    diag_cy = -np.bincount(row, weights=cy, minlength=n_rows)[diag_row]
    row = np.concatenate([row, diag_row])
    col = np.concatenate([col, rows[diag_row]])
    cx = np.concatenate([cx, diag_cx])
    cy = np.concatenate([cy, diag_cy])
    shape = (n_rows, n)
    dx = sparse.coo_matrix((cx, (row, col)), shape=shape).tocsr()
    dy = sparse.coo_matrix((cy, (row, col)), shape=shape).tocsr()
    if len(pending):
        good = np.flatnonzero(valid)
        if len(good) == 0:
            failed[pending] = True
            log.warning(f'{len(pending)} stencil(s) with no valid neighbour: derivatives set to zero')
        else:
            delta = positions[rows[pending]][:, None, :] - positions[rows[good]][None, :, :]
            nearest = good[np.argmin((delta ** 2).sum(axis=2), axis=1)]
            dx, dy = _copy_rows(dx, pending, nearest), _copy_rows(dy, pending, nearest)
            degenerate[pending] = True
            log.debug(f'{len(pending)} stencil row(s) copied from the nearest valid neighbour')
    degenerate |= widened_first & ~failed
    return LsqStencil(rows=rows, dx=dx, dy=dy, h=h, degenerate=degenerate, failed=failed)



def _copy_rows(matrix: sparse.csr_matrix, targets: np.ndarray, sources: np.ndarray) -> sparse.csr_matrix:
    lil = matrix.tolil()
    for target, source in zip(targets, sources):
        lil.rows[target] = list(lil.rows[source])
        lil.data[target] = list(lil.data[source])
    return lil.tocsr()


def build_stencil(i: int, neighbors: NeighborTable, positions: np.ndarray, order: int = 1) -> StencilRow:
    """Stencil of a single particle using the radius of ``neighbors``."""
    stencil = build_stencils(positions, neighbors.radius, rows=np.array([i]), table=neighbors, order=order)
    return stencil.row(0)


def gradient(f: np.ndarray, stencils: LsqStencil) -> np.ndarray:
    """(n_rows, 2) gradient of the scalar field ``f`` given on the whole cloud."""
    f = np.asarray(f, dtype=float)
    return np.stack([stencils.dx @ f, stencils.dy @ f], axis=1)


def divergence(u: np.ndarray, stencils: LsqStencil) -> np.ndarray:
    """d/dx u_x + d/dy u_y at the stencil rows; ``u`` is (n_cloud, 2)."""
    u = np.asarray(u, dtype=float)
    return stencils.dx @ u[:, 0] + stencils.dy @ u[:, 1]


def gradient_at(point: np.ndarray, positions: np.ndarray, values: np.ndarray, h: float) -> np.ndarray:
    """
    Gradient at an arbitrary point, which need not be a cloud node:
    weighted fit of f_j = a + g . (x_j - point) over the nodes within ``h`` (widened if too few).
    Zero if no fit is possible.
    """
    point = np.asarray(point, dtype=float).reshape(2)
    positions = np.asarray(positions, dtype=float).reshape(-1, 2)
    values = np.asarray(values, dtype=float)
    radius = h
    for attempt in range(WIDEN_ATTEMPTS + 1):
        _, j, dist = query_pairs(point[None, :], positions, radius)
        if len(j) >= 3:
            offsets = (positions[j] - point) / radius
            w = np.exp(-WEIGHT_ALPHA * (dist / radius) ** 2)
            basis = np.column_stack([np.ones(len(j)), offsets])
            normal = basis.T @ (basis * w[:, None])
            if np.linalg.cond(normal) < CONDITION_LIMIT:
                coeff = np.linalg.solve(normal, basis.T @ (w * values[j]))
                return coeff[1:] / radius
        radius *= WIDEN_FACTOR
    return np.zeros(2)


def choose_lsq_radius(positions: np.ndarray, spacing: float, target: int = 8,
                      table: Optional[NeighborTable] = None, largest: float = 4.) -> float:
    """
    Smallest multiple (1.5, 2.0, 2.5, ...) of ``spacing`` at which the median particle has
    ``target`` neighbours (itself excluded).
    """
    positions = np.asarray(positions, dtype=float).reshape(-1, 2)
    n = len(positions)
    if n == 0:
        return 1.5 * spacing
    if table is None or table.radius < largest * spacing:
        qi, j, dist = query_pairs(positions, positions, largest * spacing)
    else:
        qi, j, dist = table.i, table.j, table.dist
    others = qi != j
    qi, dist = qi[others], dist[others]
    for multiple in np.arange(1.5, largest + 1e-9, 0.5):
        counts = np.bincount(qi[dist <= multiple * spacing], minlength=n)
        if np.median(counts) >= target:
            return float(multiple * spacing)
    return float(largest * spacing)
