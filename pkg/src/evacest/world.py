"""Fixed-timestep 2D agent simulation: goal seeking toward door segments,
ORCA collision avoidance against neighbors and walls, wall pushout as a
containment safety net, and per-tick metric accumulation.

The per-tick work (preferred velocity, ORCA, integration, pushout, goal
crossing) runs in a single numba kernel; the Python layer handles route
advancement, spawning and bookkeeping.
"""

from dataclasses import dataclass

import numpy as np
from numba import njit

from .orca import compute_velocities

DEFAULT_RADIUS = 0.3
DEFAULT_MAX_SPEED = 1.2


@dataclass
class SimConfig:
    dt: float = 1.0 / 24.0
    tau: float = 3.0
    tau_obst: float = 1.0
    neighbor_radius: float = 5.0
    max_sim_time: float = 1000.0
    rng_seed: int = 0

    def validate(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.tau < self.dt:
            raise ValueError("tau must be >= dt")
        if self.max_sim_time <= 0:
            raise ValueError("max_sim_time must be positive")


def seg_nearest(p, a, b):
    """Nearest point to p on segment ab (all 2-vectors)."""
    e = b - a
    e2 = float(e @ e)
    if e2 <= 1e-18:
        return np.array(a, dtype=float)
    t = float((p - a) @ e) / e2
    t = min(1.0, max(0.0, t))
    return a + t * e


@njit(cache=True)
def _nearest_t(px, py, ax, ay, bx, by):
    ex = bx - ax
    ey = by - ay
    e2 = ex * ex + ey * ey
    if e2 <= 1e-18:
        return 0.0
    t = ((px - ax) * ex + (py - ay) * ey) / e2
    if t < 0.0:
        return 0.0
    if t > 1.0:
        return 1.0
    return t


@njit(cache=True)
def _pref_velocity(px, py, ax, ay, bx, by, radius, max_speed, dt, out):
    """Preferred velocity toward the nearest point of the radius-inset goal
    segment.

    Door-sized segments are transit targets: the agent heads for them at
    full speed and walks straight through (progress is detected by the
    movement crossing the segment). Near-degenerate segments act as point
    goals with slow-in arrival: the agent closes in until its center is
    (almost) on the point, then stops."""
    ex = bx - ax
    ey = by - ay
    elen = np.sqrt(ex * ex + ey * ey)
    if elen < 0.1:
        # distance to the actual segment decides arrival
        t = _nearest_t(px, py, ax, ay, bx, by)
        dx = ax + t * ex - px
        dy = ay + t * ey - py
        if np.sqrt(dx * dx + dy * dy) <= 0.05:
            out[0] = 0.0
            out[1] = 0.0
            return
    # aim at the segment inset by the radius so jambs are cleared
    if elen > 1e-12:
        inset = min(radius, 0.5 * elen)
        ux = ex / elen
        uy = ey / elen
        iax = ax + ux * inset
        iay = ay + uy * inset
        ibx = bx - ux * inset
        iby = by - uy * inset
    else:
        iax, iay, ibx, iby = ax, ay, bx, by
    t = _nearest_t(px, py, iax, iay, ibx, iby)
    dx = iax + t * (ibx - iax) - px
    dy = iay + t * (iby - iay) - py
    dist = np.sqrt(dx * dx + dy * dy)
    if dist <= 1e-12:
        out[0] = 0.0
        out[1] = 0.0
        return
    speed = max_speed if elen >= 0.1 else min(max_speed, dist / dt)
    out[0] = dx / dist * speed
    out[1] = dy / dist * speed


@njit(cache=True)
def _segments_cross(ax, ay, bx, by, cx, cy, dx, dy):
    """Proper intersection test between segments AB and CD."""
    d1 = (dx - cx) * (ay - cy) - (dy - cy) * (ax - cx)
    d2 = (dx - cx) * (by - cy) - (dy - cy) * (bx - cx)
    d3 = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    d4 = (bx - ax) * (dy - ay) - (by - ay) * (dx - ax)
    return d1 * d2 < 0 and d3 * d4 < 0


@njit(cache=True)
def _crossed_goal(ox, oy, nx, ny, ax, ay, bx, by, margin):
    """True when the move (ox,oy)->(nx,ny) reaches or crosses the line of
    goal segment AB within `margin` beyond its ends.

    Ending exactly on the line counts as a crossing (a constant-speed
    walker can land on it precisely); starting on it does not, so each
    crossing fires once."""
    ex = bx - ax
    ey = by - ay
    elen = np.sqrt(ex * ex + ey * ey)
    if elen < 1e-12:
        return False
    d_old = ex * (oy - ay) - ey * (ox - ax)
    d_new = ex * (ny - ay) - ey * (nx - ax)
    eps = 1e-9 * elen
    if abs(d_old) <= eps:
        return False  # started on the line; counted on the arrival tick
    if (d_new > eps) == (d_old > eps) and abs(d_new) > eps:
        return False  # stayed on one side
    if abs(d_new) <= eps:
        cx = nx
        cy = ny
    else:
        t = d_old / (d_old - d_new)
        cx = ox + t * (nx - ox)
        cy = oy + t * (ny - oy)
    s = ((cx - ax) * ex + (cy - ay) * ey) / elen
    return -margin <= s <= elen + margin


@njit(cache=True)
def _tick(pos, vel, radius, max_speed, active, goal_a, goal_b, last_goal,
          walls, dt, tau, tau_obst, neighbor_radius, pref, new_vel, fallback,
          crossed):
    """One full tick for all agents. Returns (speed_sum, active_count).

    crossed[i] is set when agent i reaches its current goal segment after
    integration; route handling stays in Python. last_goal[i] marks agents
    on the final segment of their route, where reaching is by disc contact
    rather than by crossing.
    """
    n = pos.shape[0]
    for i in range(n):
        if active[i]:
            _pref_velocity(pos[i, 0], pos[i, 1], goal_a[i, 0], goal_a[i, 1],
                           goal_b[i, 0], goal_b[i, 1], radius[i], max_speed[i],
                           dt, pref[i])
        else:
            pref[i, 0] = 0.0
            pref[i, 1] = 0.0
    compute_velocities(pos, vel, radius, max_speed, active, pref, walls,
                       dt, tau, tau_obst, neighbor_radius, new_vel, fallback)
    speed_sum = 0.0
    count = 0
    n_walls = walls.shape[0]
    for i in range(n):
        if not active[i]:
            continue
        old_x = pos[i, 0]
        old_y = pos[i, 1]
        vel[i, 0] = new_vel[i, 0]
        vel[i, 1] = new_vel[i, 1]
        pos[i, 0] += vel[i, 0] * dt
        pos[i, 1] += vel[i, 1] * dt
        # wall pushout, two passes for corners
        for _ in range(2):
            for w in range(n_walls):
                t = _nearest_t(pos[i, 0], pos[i, 1], walls[w, 0], walls[w, 1],
                               walls[w, 2], walls[w, 3])
                cx = walls[w, 0] + t * (walls[w, 2] - walls[w, 0])
                cy = walls[w, 1] + t * (walls[w, 3] - walls[w, 1])
                dx = pos[i, 0] - cx
                dy = pos[i, 1] - cy
                dist = np.sqrt(dx * dx + dy * dy)
                if 1e-12 < dist < radius[i]:
                    push = (radius[i] - dist) / dist
                    pos[i, 0] += dx * push
                    pos[i, 1] += dy * push
        # never let the tick's net move cross a wall: tunneling (through a
        # corner vertex, or via a pushout that guessed the wrong side)
        # would strand the agent outside. Revert instead; crowd pressure
        # resolves on later ticks.
        for w in range(n_walls):
            if _segments_cross(old_x, old_y, pos[i, 0], pos[i, 1],
                               walls[w, 0], walls[w, 1],
                               walls[w, 2], walls[w, 3]):
                pos[i, 0] = old_x
                pos[i, 1] = old_y
                break
        ddx = pos[i, 0] - old_x
        ddy = pos[i, 1] - old_y
        speed_sum += np.sqrt(ddx * ddx + ddy * ddy) / dt
        count += 1
        ex = goal_b[i, 0] - goal_a[i, 0]
        ey = goal_b[i, 1] - goal_a[i, 1]
        elen = np.sqrt(ex * ex + ey * ey)
        if elen < 0.1 or last_goal[i]:
            # point goals and final segments (exits): arrive by disc
            # contact. Removing exiting agents a disc's width before the
            # line keeps the region in front of the opening draining, which
            # matches how dense crowds actually thin out at an exit.
            t = _nearest_t(pos[i, 0], pos[i, 1], goal_a[i, 0], goal_a[i, 1],
                           goal_b[i, 0], goal_b[i, 1])
            gx = goal_a[i, 0] + t * (goal_b[i, 0] - goal_a[i, 0])
            gy = goal_a[i, 1] + t * (goal_b[i, 1] - goal_a[i, 1])
            dx = pos[i, 0] - gx
            dy = pos[i, 1] - gy
            crossed[i] = np.sqrt(dx * dx + dy * dy) <= radius[i]
        else:
            # intermediate door: require the tick's movement to actually
            # cross the segment (extended by the radius at the ends). Disc
            # contact alone would advance queued agents standing beside the
            # gap but still behind the wall, stranding them on a route
            # whose next leg is unreachable.
            crossed[i] = _crossed_goal(
                old_x, old_y, pos[i, 0], pos[i, 1],
                goal_a[i, 0], goal_a[i, 1], goal_b[i, 0], goal_b[i, 1],
                radius[i])
    return speed_sum, count


class Simulation:
    """Mutable tick-loop state for one scenario.

    Agents carry a route: a list of goal segments they cross in order. An
    agent whose disc touches its last segment is removed (exited) unless it
    was added with remove_on_last=False, in which case it parks there
    (waypoint mode, used by the showcase scenario).
    """

    def __init__(self, walls, cfg: SimConfig, walkable_area=0.0):
        cfg.validate()
        self.cfg = cfg
        self.walls = np.asarray(walls, dtype=float).reshape(-1, 4)
        self.walkable_area = walkable_area
        self.time = 0.0
        self.rng = np.random.Generator(np.random.PCG64(cfg.rng_seed))

        self._cap = 16
        self.n = 0
        self.pos = np.zeros((self._cap, 2))
        self.vel = np.zeros((self._cap, 2))
        self.radius = np.zeros(self._cap)
        self.max_speed = np.zeros(self._cap)
        self.active = np.zeros(self._cap, dtype=np.bool_)
        self.exited_at = np.full(self._cap, np.nan)
        self.remove_on_last = np.zeros(self._cap, dtype=np.bool_)
        self.last_goal = np.zeros(self._cap, dtype=np.bool_)
        self.goal_a = np.zeros((self._cap, 2))
        self.goal_b = np.zeros((self._cap, 2))
        self.routes = []
        self.goal_idx = []
        self.goal_events = []  # (agent, goal index, time) per crossing
        self.fallback_count = 0

        # metric integrals
        self.speed_sum = 0.0
        self.agent_ticks = 0
        self.occupied_time = 0.0
        self.density_time_sum = 0.0

    def _grow(self, need):
        while self._cap < need:
            self._cap *= 2
        for name in ("pos", "vel", "goal_a", "goal_b"):
            arr = getattr(self, name)
            new = np.zeros((self._cap, 2))
            new[: self.n] = arr[: self.n]
            setattr(self, name, new)
        for name, fill in (("radius", 0.0), ("max_speed", 0.0), ("exited_at", np.nan)):
            arr = getattr(self, name)
            new = np.full(self._cap, fill)
            new[: self.n] = arr[: self.n]
            setattr(self, name, new)
        for name in ("active", "remove_on_last", "last_goal"):
            arr = getattr(self, name)
            new = np.zeros(self._cap, dtype=np.bool_)
            new[: self.n] = arr[: self.n]
            setattr(self, name, new)

    def add_agent(self, position, route, radius=DEFAULT_RADIUS,
                  max_speed=DEFAULT_MAX_SPEED, remove_on_last=True):
        """route: non-empty list of (a, b) segment endpoint pairs."""
        if not route:
            raise ValueError("agent route must contain at least one goal segment")
        if radius <= 0:
            raise ValueError("radius must be positive")
        i = self.n
        if i + 1 > self._cap:
            self._grow(i + 1)
        self.n = i + 1
        self.pos[i] = position
        self.vel[i] = 0.0
        self.radius[i] = radius
        self.max_speed[i] = max_speed
        self.active[i] = True
        self.remove_on_last[i] = remove_on_last
        self.routes.append([(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
                            for (a, b) in route])
        self.goal_idx.append(0)
        self.last_goal[i] = len(self.routes[i]) == 1
        a, b = self.routes[i][0]
        self.goal_a[i] = a
        self.goal_b[i] = b
        return i

    @property
    def active_count(self):
        return int(np.count_nonzero(self.active[: self.n]))

    def preferred_velocity(self, i):
        """Preferred velocity of agent i toward its current goal segment."""
        out = np.zeros(2)
        if self.active[i]:
            _pref_velocity(self.pos[i, 0], self.pos[i, 1],
                           self.goal_a[i, 0], self.goal_a[i, 1],
                           self.goal_b[i, 0], self.goal_b[i, 1],
                           self.radius[i], self.max_speed[i], self.cfg.dt, out)
        return out

    def step(self):
        """Advance one tick of cfg.dt."""
        n = self.n
        dt = self.cfg.dt
        if n > 0:
            pref = np.zeros((n, 2))
            new_vel = np.zeros((n, 2))
            fallback = np.zeros(n, dtype=np.bool_)
            crossed = np.zeros(n, dtype=np.bool_)
            speed_sum, count = _tick(
                self.pos[:n], self.vel[:n], self.radius[:n], self.max_speed[:n],
                self.active[:n], self.goal_a[:n], self.goal_b[:n],
                self.last_goal[:n], self.walls,
                dt, self.cfg.tau, self.cfg.tau_obst, self.cfg.neighbor_radius,
                pref, new_vel, fallback, crossed)
            self.fallback_count += int(np.count_nonzero(fallback & self.active[:n]))
            self.speed_sum += speed_sum
            self.agent_ticks += count
            if count > 0:
                self.occupied_time += dt
                if self.walkable_area > 0:
                    self.density_time_sum += dt * count / self.walkable_area
        else:
            crossed = np.zeros(0, dtype=np.bool_)

        self.time += dt

        for i in np.nonzero(crossed)[0]:
            self.goal_events.append((int(i), self.goal_idx[i], self.time))
            if self.goal_idx[i] + 1 < len(self.routes[i]):
                self.goal_idx[i] += 1
                self.last_goal[i] = self.goal_idx[i] + 1 == len(self.routes[i])
                ga, gb = self.routes[i][self.goal_idx[i]]
                self.goal_a[i] = ga
                self.goal_b[i] = gb
            elif self.remove_on_last[i]:
                self.active[i] = False
                self.vel[i] = 0.0
                self.exited_at[i] = self.time

    def run(self, callback=None):
        """Step until no active agents remain or max_sim_time is hit.

        Returns True if the run was censored (time cap reached with agents
        still active). callback, when given, runs after every tick.
        """
        while self.active_count > 0:
            if self.time >= self.cfg.max_sim_time:
                return True
            self.step()
            if callback is not None:
                callback(self)
        return False
