__all__ = ['load_scenario', 'scenario_from_dict', 'save_scenario', 'load_preset', 'preset_names', 'apply_overrides']

import copy
import logging
import os
from dataclasses import fields
from typing import (Any, Dict, List, Optional)

import yaml

from ..errors import ScenarioError
from ..obstacle._types import Obstacle
from ._types import (ExitRegion, Domain, SubBlock, Population, ModelParams, OutputControls, Scenario)

log = logging.getLogger(__name__)

PRESET_FOLDER = os.path.join(os.path.dirname(__file__), 'presets')


def load_scenario(path: str) -> Scenario:
    """
    Reads a YAML scenario file and returns a validated ``Scenario``.
    YAML syntax errors are re-raised as ``ScenarioError`` with the line number,
    bad or missing values as ``ScenarioError`` naming the field.
    """
    if not os.path.exists(path):
        raise ScenarioError(f'No scenario file {path}')
    with open(path, 'r') as fh:
        text = fh.read()
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as error:
        mark = getattr(error, 'problem_mark', None)
        line = mark.line + 1 if mark is not None else None
        raise ScenarioError(f'Could not parse {path}: {getattr(error, "problem", error)}', line=line) from error
    if not isinstance(data, dict):
        raise ScenarioError(f'{path} does not hold a mapping at the top level')
    data.setdefault('name', os.path.splitext(os.path.basename(path))[0])
    scenario = scenario_from_dict(data)
    log.debug(f'loaded scenario {scenario.name} from {path}')
    return scenario


def preset_names() -> List[str]:
    return sorted(os.path.splitext(fn)[0] for fn in os.listdir(PRESET_FOLDER) if fn.endswith('.yaml'))


def load_preset(name: str) -> Scenario:
    """One of the shipped corridor scenarios, e.g. ``load_preset('corridor_bi')``."""
    if name not in preset_names():
        raise ScenarioError(f'No preset {name!r}, choose from {preset_names()}')
    return load_scenario(os.path.join(PRESET_FOLDER, name + '.yaml'))


def save_scenario(scenario: Scenario, path: str) -> None:
    with open(path, 'w') as fh:
        yaml.safe_dump(scenario.to_dict(), fh, sort_keys=False)


def apply_overrides(scenario: Scenario, **overrides) -> Scenario:
    """
    Copy of the scenario with some ``ModelParams`` replaced (the CLI flags);
    obstacle constants are refreshed from the new parameters.
    """
    scenario = copy.deepcopy(scenario)
    scenario.params = scenario.params.override(**overrides)
    for obstacle in scenario.obstacles:
        _sync_obstacle(obstacle, scenario.params)
    return scenario


# ----------------------------------------------------------------------------------------------------------------------

def _get(data: Dict[str, Any], key: str, where: str, default: Any = ..., kind=float):
    if key not in data or data[key] is None:
        if default is ...:
            raise ScenarioError(f'Missing required field {key}', field=f'{where}.{key}' if where else key)
        return default
    value = data[key]
    try:
        if kind is float:
            return float(value)
        elif kind is int:
            number = float(value)
            if isinstance(value, bool) or not number.is_integer():
                raise ValueError
            return int(number)
        elif kind is bool:
            if not isinstance(value, bool):
                raise TypeError
            return value
        elif kind is str:
            return str(value)
        return kind(value)
    except (TypeError, ValueError) as error:
        raise ScenarioError(f'{key} has an invalid value {value!r}', field=f'{where}.{key}' if where else key) from error


def _floats(value: Any, n: int, where: str) -> tuple:
    try:
        values = tuple(float(v) for v in value)
    except (TypeError, ValueError) as error:
        raise ScenarioError(f'Expected {n} numbers, got {value!r}', field=where) from error
    if len(values) != n:
        raise ScenarioError(f'Expected {n} numbers, got {len(values)}', field=where)
    return values


def _parse_domain(data: Dict[str, Any]) -> Domain:
    if not isinstance(data, dict):
        raise ScenarioError('Missing domain section', field='domain')
    width = _get(data, 'width', 'domain')
    height = _get(data, 'height', 'domain')
    exits = []
    for k, entry in enumerate(data.get('exits') or []):
        where = f'domain.exits[{k}]'
        exits.append(ExitRegion(id=_get(entry, 'id', where, kind=str),
                                side=_get(entry, 'side', where, kind=str),
                                interval=_floats(entry.get('interval', [0, height if entry.get('side') in ('left', 'right') else width]),
                                                 2, f'{where}.interval')))
    if 'walls' in data and data['walls'] is not None:
        walls = []
        for k, entry in enumerate(data['walls']):
            flat = _floats([v for point in entry for v in point], 4, f'domain.walls[{k}]')
            walls.append(((flat[0], flat[1]), (flat[2], flat[3])))
        return Domain(width=width, height=height, wall_segments=walls, exit_regions=exits)
    return Domain.corridor(width, height, exits)


def _parse_population(entry: Dict[str, Any], k: int) -> Population:
    where = f'populations[{k}]'
    subs = []
    for j, sub in enumerate(entry.get('sub_blocks') or []):
        subs.append(SubBlock(block=_floats(sub.get('block'), 4, f'{where}.sub_blocks[{j}].block'),
                             fractions=_floats(sub.get('fractions'), 3, f'{where}.sub_blocks[{j}].fractions')))
    return Population(id=_get(entry, 'id', where, kind=str),
                      goal_id=_get(entry, 'goal', where, kind=str),
                      seeding_block=_floats(entry.get('block'), 4, f'{where}.block'),
                      spacing=_get(entry, 'spacing', where),
                      initial_fractions=_floats(entry.get('fractions', [1, 0, 0]), 3, f'{where}.fractions'),
                      sub_blocks=subs)


def _parse_params(data: Dict[str, Any]) -> ModelParams:
    """
    Every field has a default unless ``use_defaults: false`` is given.
    A key present with an empty value counts as missing, except for fields whose default is empty (``C_pen``).
    """
    data = dict(data or {})
    use_defaults = data.pop('use_defaults', True)
    defaults = ModelParams()
    values = {}
    for f in fields(ModelParams):
        kind = type(getattr(defaults, f.name)) if getattr(defaults, f.name) is not None else float
        present = f.name in data
        if present and data[f.name] is None and getattr(defaults, f.name) is not None:
            raise ScenarioError(f'Missing value for {f.name}', field=f'params.{f.name}')
        if not present and not use_defaults and f.name in _table_fields:
            raise ScenarioError(f'Missing required field {f.name}', field=f'params.{f.name}')
        values[f.name] = _get(data, f.name, 'params', getattr(defaults, f.name), kind=kind)
    unknown = set(data) - set(values)
    if unknown:
        raise ScenarioError(f'Unknown parameter(s) {sorted(unknown)}', field='params')
    return ModelParams(**values)


_table_fields = ('V_max', 'rho_max', 'T', 'C_r', 'l_r', 'C_r_obs', 'l_r_obs', 'i_o', 'nu', 'theta',
                 'V_max_obs', 'T_obs', 'dt', 't_end', 'contact_time_enabled', 'phi_wall', 'V_min')


def _sync_obstacle(obstacle: Obstacle, params: ModelParams) -> None:
    obstacle.C_r_obs = params.C_r_obs
    obstacle.l_r_obs = params.l_r_obs
    obstacle.V_max_obs = params.V_max_obs
    obstacle.T_obs = params.T_obs


def _parse_obstacle(entry: Dict[str, Any], k: int, params: ModelParams) -> Obstacle:
    where = f'obstacles[{k}]'
    moving = _get(entry, 'moving', where, False, kind=bool)
    obstacle = Obstacle(id=_get(entry, 'id', where, f'obstacle{k}', kind=str),
                        center=_floats(entry.get('center'), 2, f'{where}.center'),
                        half_extents=_floats(entry.get('half_extents'), 2, f'{where}.half_extents'),
                        moving=moving,
                        goal_id=_get(entry, 'goal', where, None, kind=str),
                        velocity=_floats(entry.get('velocity', [0, 0]), 2, f'{where}.velocity'))
    _sync_obstacle(obstacle, params)
    return obstacle


def scenario_from_dict(data: Dict[str, Any]) -> Scenario:
    params = _parse_params(data.get('params'))
    output_data = data.get('output') or {}
    output = OutputControls(frame_interval=_get(output_data, 'frame_interval', 'output', 0.5),
                            trajectory_interval=_get(output_data, 'trajectory_interval', 'output', 0.1),
                            directory=_get(output_data, 'directory', 'output', None, kind=str),
                            dump_eikonal=_get(output_data, 'dump_eikonal', 'output', False, kind=bool))
    populations_data = data.get('populations')
    if not populations_data:
        raise ScenarioError('At least one population is required', field='populations')
    scenario = Scenario(name=str(data.get('name', 'scenario')),
                        domain=_parse_domain(data.get('domain')),
                        populations=[_parse_population(entry, k) for k, entry in enumerate(populations_data)],
                        obstacles=[_parse_obstacle(entry, k, params)
                                   for k, entry in enumerate(data.get('obstacles') or [])],
                        params=params,
                        output=output)
    scenario.validate()
    return scenario
