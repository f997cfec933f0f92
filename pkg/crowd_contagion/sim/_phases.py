import logging
import warnings

import numpy as np

from ..contagion.fractions import step_fractions
from ..contagion.kernel import infection_rates
from ..eikonal.boundary import FREE, GOAL, WALL, OBSTACLE, assemble_nodes
from ..eikonal.field import solve_eikonal, refresh_policy
from ..eikonal.speed import speed_field
from ..errors import SimulationError
from ..obstacle.coupling import (obstacle_force_from_crowd, obstacle_density, step_obstacle,
                                 crowd_force_from_obstacle)
from ..obstacle.ghosts import stamp_obstacle_boundary
from ..pedestrians.forces import morse_forces
from ..pedestrians.kinematics import desired_velocity, step_velocity, step_density, step_position, \
    project_out_of_obstacles
from ..pedestrians.particles import total_density
from ..pointcloud.neighbors import build_neighbors
from ..pointcloud.stencil import build_stencils, divergence, choose_lsq_radius
from ..pointcloud.volumes import update_volumes, interpolate_density
from .state import SimState

log = logging.getLogger(__name__)


class SimulatorPhases:
    """
    The phases of one step, in order. Each reads the state left by the previous ones;
    ``state.scratch`` carries the per-step intermediates (forces, desired velocities, exits).
    """

    phase_order = ('neighbors', 'volumes', 'eikonal', 'forces', 'contagion', 'kinematics', 'obstacles', 'removal',
                   'diagnostics')

    def advance(self, state: SimState = None) -> SimState:
        """
        One time step. Any failure is re-raised as ``SimulationError`` carrying the step index and phase name.
        """
        state = self.state if state is None else state
        for name in self.phase_order:
            phase = getattr(self, f'_phase_{name}')
            try:
                phase(state)
            except SimulationError as error:
                if error.step is not None:
                    raise
                raise type(error)(str(error), step=state.step, phase=name) from error
            except Exception as error:
                raise SimulationError(f'{error.__class__.__name__}: {error}', step=state.step, phase=name) from error
        return state

    # ---------------------------------------------------------------------------------------------------------------

    def _phase_neighbors(self, state: SimState):
        alive = state.cloud.alive_index
        state.alive_rows = alive
        state.neighbors = build_neighbors(state.cloud.x[alive], max(self.params.h_U, self.params.h_phi))

    def _phase_volumes(self, state: SimState):
        cloud = state.cloud
        alive = state.alive_rows
        state.dV[:] = 0.
        state.dV[alive] = update_volumes(cloud.m[alive], cloud.rho[alive])
        state.rho_total = total_density(cloud, self.interpolation_radius)
        state.scratch['x_start'] = cloud.x[alive].copy()

    def _phase_eikonal(self, state: SimState):
        if not refresh_policy(state.step, self.params, state.obstacle_displacement(), self.spacing):
            return
        for obstacle in state.obstacles:
            stamp_obstacle_boundary(obstacle, state.ghosts)
        for obstacle in state.moving_obstacles:
            if obstacle.id not in state.obstacle_fields:
                state.obstacle_fields[obstacle.id] = self._solve_obstacle_field(state, obstacle)
            state.solve_centers[obstacle.id] = obstacle.center.copy()
        cloud = state.cloud
        alive = state.alive_rows
        if len(alive) == 0:
            return
        background = self.background[~self._inside_obstacles(self.background, state.active_obstacles)]
        speed = np.concatenate([speed_field(state.rho_total[alive], self.params),
                                speed_field(self._node_density(state, background), self.params)])
        pop = cloud.pop[alive]
        for goal in sorted(set(self.population_goals[k] for k in np.unique(pop))):
            nodes, kinds = assemble_nodes([(cloud.x[alive], FREE),
                                           (background, FREE),
                                           (self.walls, WALL),
                                           (state.ghosts.all_points, OBSTACLE),
                                           (self.exit_nodes[goal], GOAL)])
            node_speed = np.concatenate([speed, np.full(len(nodes) - len(speed), self.params.V_max)])
            field = solve_eikonal(nodes, kinds, node_speed, goal, h=self.eikonal_h,
                                  phi_wall=self.params.phi_wall,
                                  method=self.params.eikonal_method,
                                  rows=np.arange(len(alive)),
                                  exit_normal=self.domain.get_exit(goal).normal,
                                  eps_grad=self.params.eps_grad,
                                  descent_h=self.descent_h,
                                  stencil_order=self.params.stencil_order,
                                  stamp=state.t, step=state.step)
            state.fields[goal] = field
            mine = np.isin(pop, [k for k, g in enumerate(self.population_goals) if g == goal])
            state.descent[alive[mine]] = field.descent[mine]
            state.diagnostics.eikonal_solves += 1
            state.diagnostics.unreachable_nodes += field.n_unreachable
        for k in range(len(cloud.pop_ids)):
            rows = cloud.population_index(k)
            if len(rows):
                mean_spacing = float(np.sqrt(np.mean(state.dV[rows])))
                state.lsq_radius[k] = choose_lsq_radius(cloud.x[rows], mean_spacing)
        log.debug(f'step {state.step}: eikonal fields refreshed')

    def _phase_forces(self, state: SimState):
        cloud = state.cloud
        alive = state.alive_rows
        params = self.params
        x = cloud.x[alive]
        state.scratch['F_morse'] = morse_forces(state.neighbors, x, cloud.m[alive], params.C_r, params.l_r,
                                                params.h_U)
        obstacles = state.active_obstacles
        if params.obstacle_penalty and obstacles:
            state.scratch['F_obs'] = crowd_force_from_obstacle(x, obstacles, params.pen_strength, params.l_pen)
        else:
            state.scratch['F_obs'] = np.zeros_like(x)
        state.scratch['v_des'] = desired_velocity(state.descent[alive], state.rho_total[alive], params)

    def _phase_contagion(self, state: SimState):
        cloud = state.cloud
        alive = state.alive_rows
        beta = infection_rates(state.neighbors, cloud.x[alive], cloud.u[alive], cloud.alpha[alive, 2],
                               state.dV[alive], self.kernel)
        cloud.alpha[alive] = step_fractions(cloud.alpha[alive], beta, self.params.nu, self.params.theta,
                                            self.params.dt)

    def _phase_kinematics(self, state: SimState):
        cloud = state.cloud
        alive = state.alive_rows
        params = self.params
        dt = params.dt
        u = step_velocity(cloud.u[alive], state.scratch['v_des'], state.scratch['F_morse'], state.scratch['F_obs'],
                          dt, params.T)
        rho = cloud.rho[alive].copy()
        x = cloud.x[alive]
        pop = cloud.pop[alive]
        for k in range(len(cloud.pop_ids)):
            local = np.flatnonzero(pop == k)
            if len(local) == 0:
                continue
            h = state.lsq_radius.get(k, 1.5 * self.spacing)
            stencils = build_stencils(x[local], h, order=params.stencil_order)
            rho[local] = step_density(rho[local], divergence(u[local], stencils), dt)
            state.diagnostics.degenerate_stencils += int(stencils.degenerate.sum())
            state.diagnostics.failed_stencils += int(stencils.failed.sum())
        fast = np.sqrt(u[:, 0] ** 2 + u[:, 1] ** 2) > 2 * params.V_max
        if fast.any():
            state.diagnostics.fast_particles += int(fast.sum())
            warnings.warn('Pedestrian speed above 2 V_max')
        x, u, exited = step_position(x, u, dt, self.domain, self.exits, pop, state.active_obstacles)
        cloud.x[alive] = x
        cloud.u[alive] = u
        cloud.rho[alive] = rho
        state.scratch['exited'] = alive[exited]

    def _phase_obstacles(self, state: SimState):
        cloud = state.cloud
        alive = state.alive_rows
        x = state.scratch.get('x_start', cloud.x[alive])
        for index, obstacle in enumerate(state.obstacles):
            if not (obstacle.moving and obstacle.active):
                continue
            goal = self.domain.get_exit(obstacle.goal_id)
            field = state.obstacle_fields.get(obstacle.id)
            if field is None:
                descent = goal.normal
            else:
                descent = field.descent_at(obstacle.center, goal.normal, self.params.eps_grad)
            rho = obstacle_density(obstacle, x, state.rho_total[alive], self.interpolation_radius)
            force = obstacle_force_from_crowd(obstacle, x, cloud.m[alive])
            moved = step_obstacle(obstacle, descent, rho, force, self.params.dt, self.params, self.domain)
            if not moved.active:
                log.info(f'obstacle {obstacle.id} left through {obstacle.goal_id} at t={state.t:.3f}')
            state.obstacles[index] = moved
        obstacles = state.active_obstacles
        if obstacles and len(alive):
            rows = np.setdiff1d(alive, state.scratch.get('exited', np.zeros(0, dtype=np.int64)))
            cloud.x[rows], cloud.u[rows] = project_out_of_obstacles(cloud.x[rows], cloud.u[rows], obstacles)

    def _phase_removal(self, state: SimState):
        exited = state.scratch.get('exited', np.zeros(0, dtype=np.int64))
        if len(exited):
            state.cloud.remove(exited)
            state.diagnostics.exited += len(exited)

    def _phase_diagnostics(self, state: SimState):
        cloud = state.cloud
        alive = cloud.alive_index
        diagnostics = state.diagnostics
        if len(alive):
            simplex = float(np.abs(cloud.alpha[alive].sum(axis=1) - 1).max())
            diagnostics.max_simplex_error = max(diagnostics.max_simplex_error, simplex)
        if cloud.initial_mass > 0:
            mass = abs(cloud.alive_mass + cloud.removed_mass - cloud.initial_mass) / cloud.initial_mass
            diagnostics.max_mass_error = max(diagnostics.max_mass_error, mass)
        state.step += 1
        state.t = state.step * self.params.dt
        state.scratch.clear()

    # ---------------------------------------------------------------------------------------------------------------

    @staticmethod
    def _inside_obstacles(points: np.ndarray, obstacles) -> np.ndarray:
        inside = np.zeros(len(points), dtype=bool)
        for obstacle in obstacles:
            inside |= obstacle.contains(points, strict=False)
        return inside

    def _node_density(self, state: SimState, points: np.ndarray) -> np.ndarray:
        """Density of all populations at massless nodes."""
        cloud = state.cloud
        density = np.zeros(len(points))
        for k in range(len(cloud.pop_ids)):
            rows = cloud.population_index(k)
            if len(rows):
                density += interpolate_density(points, cloud.x[rows], cloud.rho[rows], self.interpolation_radius)
        return density

    def _solve_obstacle_field(self, state: SimState, obstacle):
        """Unit-speed travel distance to the obstacle's goal, around walls and fixed obstacles only."""
        fixed = [o for o in state.obstacles if not o.moving and o.active]
        background = self.background[~self._inside_obstacles(self.background, fixed)]
        outlines = [state.ghosts.points[o.id] for o in fixed if o.id in state.ghosts.points]
        ghosts = np.vstack(outlines) if outlines else np.zeros((0, 2))
        nodes, kinds = assemble_nodes([(background, FREE),
                                       (self.walls, WALL),
                                       (ghosts, OBSTACLE),
                                       (self.exit_nodes[obstacle.goal_id], GOAL)])
        field = solve_eikonal(nodes, kinds, np.ones(len(nodes)), obstacle.goal_id, h=self.eikonal_h,
                              phi_wall=self.params.phi_wall, method=self.params.eikonal_method,
                              rows=np.zeros(0, dtype=np.int64), stamp=state.t, step=state.step)
        state.diagnostics.eikonal_solves += 1
        log.debug(f'obstacle {obstacle.id}: guidance field toward {obstacle.goal_id} solved')
        return field
