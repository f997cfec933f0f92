"""
Point-cloud eikonal kernels, compiled with Numba when available.

Both solvers share ``_local_update``: the travel cost of node ``i`` from its already-solved neighbours,
by a weighted least-squares fit of an affine field whose gradient has norm ``slowness``.
When the solved neighbours are collinear (the first layer off an exit line) the fit is done along the line
and the cost rises across it; the one-point update ``phi_j + |x_i - x_j| * slowness`` caps the result.
"""

__all__ = ['march', 'sweep', 'FAR', 'TRIAL', 'KNOWN', 'BLOCKED']

import heapq

import numpy as np

from .._numba import njit

FAR, TRIAL, KNOWN, BLOCKED = 0, 1, 2, 3
_ALPHA = np.log(100.)
_COLLINEAR = 1e-6


@njit(cache=True)
def _local_update(i, indptr, indices, pos, phi, usable, limit, slowness, h):
    xi = pos[i, 0]
    yi = pos[i, 1]
    best = np.inf
    m00 = 0.
    m01 = 0.
    m11 = 0.
    a0 = 0.
    a1 = 0.
    b0 = 0.
    b1 = 0.
    count = 0
    top = -np.inf
    for k in range(indptr[i], indptr[i + 1]):
        j = indices[k]
        if j == i or not usable[j]:
            continue
        pj = phi[j]
        if not pj < limit:
            continue
        dx = (pos[j, 0] - xi) / h
        dy = (pos[j, 1] - yi) / h
        r2 = dx * dx + dy * dy
        candidate = pj + np.sqrt(r2) * h * slowness
        if candidate < best:
            best = candidate
        if r2 == 0.:
            continue
        w = np.exp(-_ALPHA * r2)
        m00 += w * dx * dx
        m01 += w * dx * dy
        m11 += w * dy * dy
        a0 += w * dx * pj
        a1 += w * dy * pj
        b0 += w * dx
        b1 += w * dy
        count += 1
        if pj > top:
            top = pj
    if count < 2:
        return best
    tol = 1e-9 * (1. + abs(top))
    target = (slowness * h) ** 2
    trace = m00 + m11
    det = m00 * m11 - m01 * m01
    if det > _COLLINEAR * trace * trace:
        # phi_j ~ t + g . d_j with g = p - t q
        p0 = (m11 * a0 - m01 * a1) / det
        p1 = (m00 * a1 - m01 * a0) / det
        q0 = (m11 * b0 - m01 * b1) / det
        q1 = (m00 * b1 - m01 * b0) / det
        qa = q0 * q0 + q1 * q1
        qb = p0 * q0 + p1 * q1
        qc = p0 * p0 + p1 * p1 - target
        if qa > 0.:
            disc = qb * qb - qa * qc
            if disc >= 0.:
                t = (qb + np.sqrt(disc)) / qa
                if t >= top - tol and t < best:
                    best = t
        return best
    # collinear solved neighbours: principal direction e, normal n
    lam = 0.5 * (trace + np.sqrt((m00 - m11) ** 2 + 4. * m01 * m01))
    e0 = m01
    e1 = lam - m00
    f0 = lam - m11
    f1 = m01
    if f0 * f0 + f1 * f1 > e0 * e0 + e1 * e1:
        e0 = f0
        e1 = f1
    norm = np.sqrt(e0 * e0 + e1 * e1)
    if norm == 0.:
        return best
    e0 /= norm
    e1 /= norm
    s0 = 0.
    s1 = 0.
    s2 = 0.
    v0 = 0.
    v1 = 0.
    across = 0.
    for k in range(indptr[i], indptr[i + 1]):
        j = indices[k]
        if j == i or not usable[j]:
            continue
        pj = phi[j]
        if not pj < limit:
            continue
        dx = (pos[j, 0] - xi) / h
        dy = (pos[j, 1] - yi) / h
        r2 = dx * dx + dy * dy
        if r2 == 0.:
            continue
        w = np.exp(-_ALPHA * r2)
        along = dx * e0 + dy * e1
        s0 += w
        s1 += w * along
        s2 += w * along * along
        v0 += w * pj
        v1 += w * along * pj
        across += w * (-dx * e1 + dy * e0)
    line_det = s0 * s2 - s1 * s1
    if line_det <= 1e-12 * s0 * s2:
        return best
    intercept = (s2 * v0 - s1 * v1) / line_det
    slope = (s0 * v1 - s1 * v0) / line_det
    rest = target - slope * slope
    if rest < 0.:
        return best
    t = intercept + abs(across / s0) * np.sqrt(rest)
    if t >= top - tol and t < best:
        best = t
    return best


@njit(cache=True)
def _march(indptr, indices, pos, slowness, phi, status, h):
    n = len(phi)
    usable = status == KNOWN
    heap = [(0., 0)]
    heap.pop()
    for s in range(n):
        if status[s] != KNOWN:
            continue
        for k in range(indptr[s], indptr[s + 1]):
            j = indices[k]
            if status[j] == FAR or status[j] == TRIAL:
                t = _local_update(j, indptr, indices, pos, phi, usable, np.inf, slowness[j], h)
                if t < phi[j]:
                    phi[j] = t
                    status[j] = TRIAL
                    heapq.heappush(heap, (t, j))
    while len(heap) > 0:
        t, i = heapq.heappop(heap)
        if status[i] == KNOWN or t > phi[i]:
            continue  # stale
        status[i] = KNOWN
        usable[i] = True
        for k in range(indptr[i], indptr[i + 1]):
            j = indices[k]
            if status[j] == FAR or status[j] == TRIAL:
                t = _local_update(j, indptr, indices, pos, phi, usable, np.inf, slowness[j], h)
                if t < phi[j]:
                    phi[j] = t
                    status[j] = TRIAL
                    heapq.heappush(heap, (t, j))
    return phi


@njit(cache=True)
def _sweep(indptr, indices, pos, slowness, phi, status, h, orders, tolerance, max_iterations):
    usable = status != BLOCKED
    iterations = 0
    for iteration in range(max_iterations):
        iterations = iteration + 1
        change = 0.
        for o in range(orders.shape[0]):
            for k in range(orders.shape[1]):
                i = orders[o, k]
                if status[i] != FAR:
                    continue
                t = _local_update(i, indptr, indices, pos, phi, usable, phi[i], slowness[i], h)
                if t < phi[i]:
                    if np.isinf(phi[i]):
                        change = np.inf
                    elif phi[i] - t > change:
                        change = phi[i] - t
                    phi[i] = t
        largest = 0.
        for i in range(len(phi)):
            if status[i] == FAR and phi[i] < np.inf and phi[i] > largest:
                largest = phi[i]
        if change <= tolerance * largest:
            break
    return phi, iterations


def march(indptr: np.ndarray, indices: np.ndarray, positions: np.ndarray, slowness: np.ndarray,
          phi: np.ndarray, status: np.ndarray, h: float) -> np.ndarray:
    """
    Ordered-upwind (fast marching) solve. ``status`` marks seeds ``KNOWN`` (their ``phi`` is the boundary value),
    excluded nodes ``BLOCKED`` and the rest ``FAR``; it is updated in place.
    Unreached nodes stay at ``inf``.
    """
    return _march(indptr.astype(np.int64), indices.astype(np.int64), np.ascontiguousarray(positions, dtype=float),
                  slowness.astype(float), phi.astype(float), status.astype(np.int64), float(h))


def sweep(indptr: np.ndarray, indices: np.ndarray, positions: np.ndarray, slowness: np.ndarray,
          phi: np.ndarray, status: np.ndarray, h: float, tolerance: float = 1e-6, max_iterations: int = 500):
    """
    Gauss-Seidel sweeping in four orderings (x up, x down, y up, y down)
    until the largest change is below ``tolerance`` times the largest free value.

    :return: phi, number of iterations
    """
    positions = np.ascontiguousarray(positions, dtype=float)
    by_x = np.lexsort((positions[:, 1], positions[:, 0]))
    by_y = np.lexsort((positions[:, 0], positions[:, 1]))
    orders = np.vstack([by_x, by_x[::-1], by_y, by_y[::-1]]).astype(np.int64)
    return _sweep(indptr.astype(np.int64), indices.astype(np.int64), positions, slowness.astype(float),
                  phi.astype(float), status.astype(np.int64), float(h), orders, float(tolerance), int(max_iterations))
