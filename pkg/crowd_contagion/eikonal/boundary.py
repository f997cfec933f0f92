__all__ = ['FREE', 'GOAL', 'WALL', 'OBSTACLE', 'KIND_NAMES', 'background_nodes', 'wall_ghosts', 'exit_ghosts',
           'perimeter_points', 'segment_points', 'assemble_nodes']

from typing import (List, Tuple)

import numpy as np

# node classification for the eikonal solve
FREE, GOAL, WALL, OBSTACLE = 0, 1, 2, 3
KIND_NAMES = ('free', 'goal', 'wall', 'obstacle')


def segment_points(start, end, spacing: float) -> np.ndarray:
    """``ceil(length / spacing)`` points at the centres of equal pieces of the segment."""
    start = np.asarray(start, dtype=float)
    end = np.asarray(end, dtype=float)
    length = float(np.linalg.norm(end - start))
    if length == 0:
        return start.reshape(1, 2)
    n = max(1, int(np.ceil(length / spacing - 1e-9)))
    fractions = (np.arange(n) + 0.5) / n
    return start + fractions[:, None] * (end - start)


def background_nodes(width: float, height: float, spacing: float) -> np.ndarray:
    """
    Static lattice over the whole domain, at most ``spacing`` apart, symmetric about both centre lines.
    It carries the travel cost between the crowd and the exits; it has no mass and never moves.
    """
    nx = max(1, int(np.ceil(width / spacing - 1e-9)))
    ny = max(1, int(np.ceil(height / spacing - 1e-9)))
    xs = (np.arange(nx) + 0.5) * width / nx
    ys = (np.arange(ny) + 0.5) * height / ny
    gx, gy = np.meshgrid(xs, ys, indexing='ij')
    return np.column_stack([gx.ravel(), gy.ravel()])


def wall_ghosts(domain, spacing: float) -> np.ndarray:
    points = [segment_points(a, b, spacing) for a, b in domain.wall_segments]
    return np.vstack(points) if points else np.zeros((0, 2))


def exit_ghosts(domain, exit_id: str, spacing: float) -> np.ndarray:
    """Nodes along the exit interval where the travel cost is zero."""
    region = domain.get_exit(exit_id)
    a, b = region.segment(domain.width, domain.height)
    return segment_points(a, b, spacing)


def perimeter_points(bounds: Tuple[float, float, float, float], spacing: float) -> np.ndarray:
    """
    ``ceil(perimeter / spacing)`` points evenly spaced along a rectangle outline,
    counter-clockwise from the lower-left corner.

    >>> len(perimeter_points((0, 0, 8, 4), 1.575))
    16
    """
    x0, y0, x1, y1 = bounds
    w, h = x1 - x0, y1 - y0
    perimeter = 2 * (w + h)
    n = max(4, int(np.ceil(perimeter / spacing - 1e-9)))
    s = np.arange(n) * perimeter / n
    points = np.empty((n, 2))
    for k, arc in enumerate(s):
        if arc < w:
            points[k] = (x0 + arc, y0)
        elif arc < w + h:
            points[k] = (x1, y0 + arc - w)
        elif arc < 2 * w + h:
            points[k] = (x1 - (arc - w - h), y1)
        else:
            points[k] = (x0, y1 - (arc - 2 * w - h))
    return points


def assemble_nodes(parts: List[Tuple[np.ndarray, int]]) -> Tuple[np.ndarray, np.ndarray]:
    """Stacks (points, kind) blocks into one node cloud, in the given order."""
    positions = [np.asarray(points, dtype=float).reshape(-1, 2) for points, _ in parts]
    kinds = [np.full(len(p), kind, dtype=np.int8) for p, (_, kind) in zip(positions, parts)]
    if not positions:
        return np.zeros((0, 2)), np.zeros(0, dtype=np.int8)
    return np.vstack(positions), np.concatenate(kinds)
