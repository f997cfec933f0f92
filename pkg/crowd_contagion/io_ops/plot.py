__all__ = ['emit_plots', 'density_map', 'obstacle_speed_profile', 'SNAPSHOT_TIMES']

import importlib.util
import logging
import os
import warnings
from typing import (List, Optional, Tuple)

import numpy as np
import pandas as pd
import plotly.graph_objects as go

from ..contagion.fractions import COLORS, LABELS
from ..scenario.load import load_scenario
from .frames import read_frame, read_table, list_frames, FrameRecord

log = logging.getLogger(__name__)

SNAPSHOT_TIMES = (10., 20., 30., 40.)


def density_map(frame: FrameRecord, bins: Tuple[int, int], width: float, height: float) \
        -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Mean particle density of the alive particles in each cell of a regular ``bins`` grid over the domain
    (0 in empty cells). The grid is indexed ``[x bin, y bin]``.

    :return: x edges, y edges, grid
    """
    alive = frame.alive
    x_edges = np.linspace(0., width, bins[0] + 1)
    y_edges = np.linspace(0., height, bins[1] + 1)
    x, y, rho = alive.x.values, alive.y.values, alive.rho.values
    total, _, _ = np.histogram2d(x, y, bins=(x_edges, y_edges), weights=rho)
    counts, _, _ = np.histogram2d(x, y, bins=(x_edges, y_edges))
    grid = np.divide(total, counts, out=np.zeros_like(total), where=counts > 0)
    return x_edges, y_edges, grid


def obstacle_speed_profile(trajectory: pd.DataFrame, obstacle_id: Optional[str] = None) -> pd.DataFrame:
    """
    ``(t, vx)`` of one obstacle from the trajectory table (``obstacles.csv``).
    Without ``obstacle_id`` the first obstacle that ever moves is taken.
    """
    if obstacle_id is None:
        moving = trajectory.groupby('id', sort=False).vx.apply(lambda vx: vx.abs().max() > 0)
        candidates = moving.index[moving.values] if moving.any() else moving.index
        obstacle_id = candidates[0]
    rows = trajectory.loc[trajectory.id == obstacle_id].sort_values('t')
    return rows[['t', 'vx']].reset_index(drop=True)


def emit_plots(run_dir: str, other: Optional[str] = None, directory: Optional[str] = None) -> List[str]:
    """
    Figures of a run directory, written into ``<run_dir>/plots`` (or ``directory``):

    * ``exposure``: exposed percentage against time, overlaid with ``other`` run when given
    * ``snapshot_t10`` ... ``snapshot_t40``: particles coloured by label
    * ``density_t10`` ... ``density_t40``: density heatmaps
    * ``obstacle_velocity``: x-velocity of the moving obstacle, if the run has one

    PNG files when kaleido is installed, HTML otherwise. A missing series skips its figure with a warning.

    :return: paths written
    """
    directory = directory or os.path.join(run_dir, 'plots')
    os.makedirs(directory, exist_ok=True)
    written = []
    exposure = _exposure_figure(run_dir, other)
    if exposure is not None:
        written.append(_save(exposure, directory, 'exposure'))
    scenario = load_scenario(os.path.join(run_dir, 'scenario.yaml'))
    width, height = scenario.domain.width, scenario.domain.height
    frames = _frame_times(run_dir)
    for target in SNAPSHOT_TIMES:
        path = _closest_frame(frames, target, scenario.output.frame_interval)
        if path is None:
            _skip(f'no frame at t={target:g} s in {run_dir}')
            continue
        frame = read_frame(path)
        written.append(_save(_snapshot_figure(frame, width, height), directory, f'snapshot_t{target:g}'))
        bins = (max(1, int(round(width / scenario.spacing))), max(1, int(round(height / scenario.spacing))))
        written.append(_save(_density_figure(frame, bins, width, height), directory, f'density_t{target:g}'))
    if any(o.moving for o in scenario.obstacles):
        path = os.path.join(run_dir, 'obstacles.csv')
        if os.path.exists(path):
            profile = obstacle_speed_profile(read_table(path))
            fig = go.Figure(go.Scatter(x=profile.t, y=profile.vx, mode='lines', name='vx'),
                            layout=go.Layout(title='Obstacle velocity', xaxis_title='t (s)',
                                             yaxis_title='vx (m/s)'))
            written.append(_save(fig, directory, 'obstacle_velocity'))
        else:
            _skip(f'{run_dir} has no obstacles.csv')
    log.info(f'{len(written)} plots written to {directory}')
    return written


# ----------------------------------------------------------------------------------------------------------------------

def _skip(message: str) -> None:
    log.warning(message)
    warnings.warn(message)


def _save(fig: go.Figure, directory: str, name: str) -> str:
    if importlib.util.find_spec('kaleido') is not None:
        path = os.path.join(directory, name + '.png')
        try:
            fig.write_image(path)
            return path
        except Exception as error:  # kaleido present but no browser to render with
            log.warning(f'{name}: PNG export failed ({error.__class__.__name__}: {error}), writing HTML')
    path = os.path.join(directory, name + '.html')
    fig.write_html(path)
    return path


def _run_label(run_dir: str) -> str:
    try:
        scenario = load_scenario(os.path.join(run_dir, 'scenario.yaml'))
    except Exception:
        return os.path.basename(os.path.normpath(run_dir))
    contact = 'with' if scenario.params.contact_time_enabled else 'without'
    return f'{scenario.name} ({contact} contact time)'


def _exposure_figure(run_dir: str, other: Optional[str]) -> Optional[go.Figure]:
    fig = go.Figure(layout=go.Layout(title='Exposed pedestrians', xaxis_title='t (s)',
                                     yaxis_title='exposed (%)'))
    for folder in [run_dir] + ([other] if other else []):
        path = os.path.join(folder, 'exposure.csv')
        if not os.path.exists(path):
            _skip(f'{folder} has no exposure.csv')
            continue
        series = read_table(path)
        fig.add_trace(go.Scatter(x=series.t, y=series.percent, mode='lines', name=_run_label(folder)))
    return fig if fig.data else None


def _frame_times(run_dir: str) -> List[Tuple[float, str]]:
    times = []
    for path in list_frames(run_dir):
        head = pd.read_csv(path, nrows=1, usecols=['t'])
        if len(head):
            times.append((float(head.t.iloc[0]), path))
    return times


def _closest_frame(frames: List[Tuple[float, str]], target: float, tolerance: float) -> Optional[str]:
    if not frames:
        return None
    t, path = min(frames, key=lambda pair: abs(pair[0] - target))
    return path if abs(t - target) <= tolerance / 2 + 1e-9 else None


def _snapshot_figure(frame: FrameRecord, width: float, height: float) -> go.Figure:
    alive = frame.alive
    fig = go.Figure(layout=go.Layout(title=f't = {frame.t:g} s',
                                     xaxis=dict(range=[0, width], title='x (m)'),
                                     yaxis=dict(range=[0, height], title='y (m)', scaleanchor='x')))
    for label in LABELS:
        subset = alive.loc[alive.label == label]
        fig.add_trace(go.Scatter(x=subset.x, y=subset.y, mode='markers', name=label,
                                 marker=dict(color=COLORS[label], size=4)))
    return fig


def _density_figure(frame: FrameRecord, bins: Tuple[int, int], width: float, height: float) -> go.Figure:
    x_edges, y_edges, grid = density_map(frame, bins, width, height)
    return go.Figure(data=go.Heatmap(x=(x_edges[1:] + x_edges[:-1]) / 2,
                                     y=(y_edges[1:] + y_edges[:-1]) / 2,
                                     z=grid.T,
                                     colorscale='Viridis',
                                     colorbar=dict(title='rho')),
                     layout=go.Layout(title=f'density, t = {frame.t:g} s',
                                      xaxis_title='x (m)',
                                      yaxis=dict(title='y (m)', scaleanchor='x')))
