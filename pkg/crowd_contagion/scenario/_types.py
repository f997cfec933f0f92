__all__ = ['ExitRegion', 'Domain', 'SubBlock', 'Population', 'ModelParams', 'OutputControls', 'Scenario']

from dataclasses import dataclass, field, fields, asdict, replace
from typing import (Optional, Tuple, List, Dict, Any)

import numpy as np

from ..errors import ScenarioError
from ..obstacle._types import Obstacle

Point = Tuple[float, float]
Segment = Tuple[Point, Point]
Block = Tuple[float, float, float, float]  # xmin, ymin, xmax, ymax

SIDES = ('left', 'right', 'bottom', 'top')


@dataclass
class ExitRegion:
    """
    A stretch of the domain boundary where pedestrians (or an obstacle) with this goal leave.
    ``interval`` is measured along the side: y for left/right, x for bottom/top.
    """
    id: str
    side: str
    interval: Tuple[float, float]

    def segment(self, width: float, height: float) -> Segment:
        a, b = self.interval
        if self.side == 'left':
            return (0., a), (0., b)
        elif self.side == 'right':
            return (width, a), (width, b)
        elif self.side == 'bottom':
            return (a, 0.), (b, 0.)
        else:
            return (a, height), (b, height)

    @property
    def normal(self) -> np.ndarray:
        """Outward unit normal: the direction of travel when leaving."""
        return {'left': np.array([-1., 0.]),
                'right': np.array([1., 0.]),
                'bottom': np.array([0., -1.]),
                'top': np.array([0., 1.])}[self.side]

    @property
    def axis(self) -> int:
        """Coordinate along which the exit is crossed."""
        return 0 if self.side in ('left', 'right') else 1

    def covers(self, along: np.ndarray) -> np.ndarray:
        """Mask of the coordinates (measured along the side) that fall in the interval."""
        a, b = self.interval
        return (along >= a) & (along <= b)


@dataclass
class Domain:
    width: float
    height: float
    wall_segments: List[Segment] = field(default_factory=list)
    exit_regions: List[ExitRegion] = field(default_factory=list)

    @classmethod
    def corridor(cls, width: float, height: float, exits: List[ExitRegion]) -> 'Domain':
        """Rigid walls top and bottom, exits on the short sides."""
        walls = [((0., 0.), (width, 0.)), ((0., height), (width, height))]
        return cls(width=width, height=height, wall_segments=walls, exit_regions=exits)

    def get_exit(self, exit_id: str) -> ExitRegion:
        for region in self.exit_regions:
            if region.id == exit_id:
                return region
        raise ScenarioError(f'Unknown exit {exit_id!r}', field='domain.exits')

    def inside(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        return (points[:, 0] >= 0) & (points[:, 0] <= self.width) & \
               (points[:, 1] >= 0) & (points[:, 1] <= self.height)

    def validate(self) -> None:
        if not self.width > 0:
            raise ScenarioError('Domain width must be positive', field='domain.width')
        if not self.height > 0:
            raise ScenarioError('Domain height must be positive', field='domain.height')
        for k, ((x0, y0), (x1, y1)) in enumerate(self.wall_segments):
            if x0 != x1 and y0 != y1:
                raise ScenarioError('Wall segments must be axis-aligned', field=f'domain.walls[{k}]')
        seen = set()
        for k, region in enumerate(self.exit_regions):
            where = f'domain.exits[{k}]'
            if region.side not in SIDES:
                raise ScenarioError(f'Exit side must be one of {SIDES}', field=where)
            if region.id in seen:
                raise ScenarioError(f'Duplicate exit id {region.id!r}', field=where)
            seen.add(region.id)
            a, b = region.interval
            length = self.height if region.side in ('left', 'right') else self.width
            if not (0 <= a < b <= length):
                raise ScenarioError('Exit region must lie on the domain boundary', field=where)
            for wall in self.wall_segments:
                if self._overlaps(region, wall):
                    raise ScenarioError('Exit region overlaps a wall segment', field=where)

    def _overlaps(self, region: ExitRegion, wall: Segment) -> bool:
        (ex0, ey0), (ex1, ey1) = region.segment(self.width, self.height)
        (wx0, wy0), (wx1, wy1) = wall
        axis = region.axis  # fixed coordinate of the exit line
        line = (ex0, ey0)[axis]
        if not ((wx0, wy0)[axis] == line == (wx1, wy1)[axis]):
            return False
        along = 1 - axis
        lo, hi = sorted(((wx0, wy0)[along], (wx1, wy1)[along]))
        a, b = region.interval
        return min(hi, b) - max(lo, a) > 0


@dataclass
class SubBlock:
    """A nested rectangle inside a seeding block with its own initial fractions (infected regions)."""
    block: Block
    fractions: Tuple[float, float, float]


@dataclass
class Population:
    id: str
    goal_id: str
    seeding_block: Block
    spacing: float
    initial_fractions: Tuple[float, float, float] = (1., 0., 0.)
    sub_blocks: List[SubBlock] = field(default_factory=list)

    def fractions_at(self, points: np.ndarray) -> np.ndarray:
        """(n, 3) initial fractions, the last matching sub-block wins."""
        points = np.atleast_2d(points)
        alpha = np.tile(np.asarray(self.initial_fractions, dtype=float), (len(points), 1))
        for sub in self.sub_blocks:
            x0, y0, x1, y1 = sub.block
            inside = (points[:, 0] >= x0) & (points[:, 0] <= x1) & (points[:, 1] >= y0) & (points[:, 1] <= y1)
            alpha[inside] = sub.fractions
        return alpha


@dataclass
class ModelParams:
    """
    Scalar model constants: the corridor defaults the presets rely on, then the numerical settings.
    ``C_pen=None`` means "same as ``C_r``".
    """
    V_max: float = 2.
    rho_max: float = 10.
    T: float = 0.001
    C_r: float = 50.
    l_r: float = 2.
    C_r_obs: float = 50.
    l_r_obs: float = 1.
    i_o: float = 0.04
    nu: float = 0.
    theta: float = 0.
    V_max_obs: float = 3.
    T_obs: float = 0.001
    dt: float = 0.001
    t_end: float = 40.
    contact_time_enabled: bool = True
    phi_wall: float = 1000.
    V_min: float = 0.05
    # numerics
    k_eik: int = 10
    eikonal_method: str = 'fast_marching'
    stencil_order: int = 1
    exposure_threshold: float = 0.05
    obstacle_penalty: bool = True
    C_pen: Optional[float] = None
    l_pen: float = 0.5
    h_phi: float = 2.5
    eps_grad: float = 1e-8

    _positive = ('V_max', 'rho_max', 'T', 'l_r', 'l_r_obs', 'V_max_obs', 'T_obs', 'dt',
                 'phi_wall', 'V_min', 'l_pen', 'h_phi', 'eps_grad')
    _non_negative = ('C_r', 'C_r_obs', 'i_o', 'nu', 'theta', 't_end', 'exposure_threshold')

    @property
    def h_U(self) -> float:
        """Morse cutoff: the tail beyond five length scales is below 1e-2 C_r."""
        return 5 * self.l_r

    @property
    def pen_strength(self) -> float:
        return self.C_r if self.C_pen is None else self.C_pen

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    def validate(self) -> None:
        for name in self._positive:
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and value > 0):
                raise ScenarioError(f'{name} must be strictly positive, got {value!r}', field=f'params.{name}')
        for name in self._non_negative:
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and value >= 0):
                raise ScenarioError(f'{name} must be non-negative, got {value!r}', field=f'params.{name}')
        if self.C_pen is not None and self.C_pen < 0:
            raise ScenarioError('C_pen must be non-negative', field='params.C_pen')
        if int(self.k_eik) != self.k_eik or self.k_eik < 1:
            raise ScenarioError('k_eik must be a positive integer', field='params.k_eik')
        if self.eikonal_method not in ('fast_marching', 'sweeping'):
            raise ScenarioError('eikonal_method must be fast_marching or sweeping', field='params.eikonal_method')
        if self.stencil_order not in (1, 2):
            raise ScenarioError('stencil_order must be 1 or 2', field='params.stencil_order')
        if self.V_min >= self.V_max:
            raise ScenarioError('V_min must be below V_max', field='params.V_min')

    def override(self, **kwargs) -> 'ModelParams':
        """Validated copy with some fields replaced (``None`` values are ignored)."""
        known = {f.name for f in fields(self)}
        unknown = set(kwargs) - known
        if unknown:
            raise ScenarioError(f'Unknown parameter(s) {sorted(unknown)}', field='params')
        changes = {k: v for k, v in kwargs.items() if v is not None}
        params = replace(self, **changes)
        params.validate()
        return params

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class OutputControls:
    frame_interval: float = 0.5
    trajectory_interval: float = 0.1
    directory: Optional[str] = None
    dump_eikonal: bool = False

    def validate(self) -> None:
        for name in ('frame_interval', 'trajectory_interval'):
            if not getattr(self, name) > 0:
                raise ScenarioError(f'{name} must be positive', field=f'output.{name}')


@dataclass
class Scenario:
    name: str
    domain: Domain
    populations: List[Population]
    obstacles: List[Obstacle] = field(default_factory=list)
    params: ModelParams = field(default_factory=ModelParams)
    output: OutputControls = field(default_factory=OutputControls)

    def __post_init__(self):
        if self.output.directory is None:
            self.output.directory = f'runs/{self.name}'

    @property
    def spacing(self) -> float:
        """Smallest population spacing: the resolution of ghosts and background nodes."""
        return min(p.spacing for p in self.populations)

    def validate(self) -> None:
        self.params.validate()
        self.output.validate()
        self.domain.validate()
        if not self.populations:
            raise ScenarioError('At least one population is required', field='populations')
        exit_ids = {region.id for region in self.domain.exit_regions}
        ids = set()
        for k, population in enumerate(self.populations):
            where = f'populations[{k}]'
            if population.id in ids:
                raise ScenarioError(f'Duplicate population id {population.id!r}', field=where)
            ids.add(population.id)
            if population.goal_id not in exit_ids:
                raise ScenarioError(f'Goal {population.goal_id!r} is not an exit region', field=f'{where}.goal')
            if not population.spacing > 0:
                raise ScenarioError('spacing must be positive', field=f'{where}.spacing')
            self._validate_block(population.seeding_block, f'{where}.block')
            for j, fractions in enumerate([population.initial_fractions] +
                                          [sub.fractions for sub in population.sub_blocks]):
                self._validate_fractions(fractions, f'{where}.fractions' if j == 0 else f'{where}.sub_blocks[{j - 1}]')
            for obstacle in self.obstacles:
                if self._blocks_overlap(population.seeding_block, obstacle.bounds):
                    raise ScenarioError(f'Seeding block overlaps obstacle {obstacle.id!r}', field=f'{where}.block')
        for k, obstacle in enumerate(self.obstacles):
            where = f'obstacles[{k}]'
            if min(obstacle.half_extents) <= 0:
                raise ScenarioError('half_extents must be positive', field=f'{where}.half_extents')
            self._validate_block(obstacle.bounds, where)
            if obstacle.moving and obstacle.goal_id not in exit_ids:
                raise ScenarioError(f'Goal {obstacle.goal_id!r} is not an exit region', field=f'{where}.goal')

    def _validate_block(self, block: Block, where: str) -> None:
        x0, y0, x1, y1 = block
        if not (x0 < x1 and y0 < y1):
            raise ScenarioError('Rectangle must have xmin < xmax and ymin < ymax', field=where)
        if x0 < 0 or y0 < 0 or x1 > self.domain.width or y1 > self.domain.height:
            raise ScenarioError('Rectangle must lie inside the domain', field=where)

    @staticmethod
    def _validate_fractions(fractions, where: str) -> None:
        if len(fractions) != 3 or min(fractions) < 0 or abs(sum(fractions) - 1) > 1e-12:
            raise ScenarioError('Fractions must be three non-negative numbers summing to 1', field=where)

    @staticmethod
    def _blocks_overlap(a: Block, b: Block) -> bool:
        return min(a[2], b[2]) > max(a[0], b[0]) and min(a[3], b[3]) > max(a[1], b[1])

    def to_dict(self) -> Dict[str, Any]:
        """Fully resolved description: ``load_scenario`` on its YAML dump gives back the same scenario."""
        domain = dict(width=self.domain.width,
                      height=self.domain.height,
                      walls=[[list(a), list(b)] for a, b in self.domain.wall_segments],
                      exits=[dict(id=r.id, side=r.side, interval=list(r.interval))
                             for r in self.domain.exit_regions])
        populations = []
        for p in self.populations:
            populations.append(dict(id=p.id,
                                    goal=p.goal_id,
                                    spacing=p.spacing,
                                    block=list(p.seeding_block),
                                    fractions=list(p.initial_fractions),
                                    sub_blocks=[dict(block=list(s.block), fractions=list(s.fractions))
                                                for s in p.sub_blocks]))
        return dict(name=self.name,
                    domain=domain,
                    populations=populations,
                    obstacles=[o.to_dict() for o in self.obstacles],
                    params=self.params.to_dict(),
                    output=asdict(self.output))
