"""Room construction and room/environment simulation runners.

Single rooms are rectangles [0,w] x [0,l] with the exit gap centered on the
y=l wall and the spawning band along the opposite wall (y=0). Multi-room
layouts stack rectangular rooms into chains sharing door gaps.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .world import DEFAULT_MAX_SPEED, DEFAULT_RADIUS, SimConfig, Simulation

SPIRAL_SPACING = 0.6


@dataclass
class RoomSpec:
    """The six per-room inputs the surrogate consumes."""
    width: float
    length: float
    exit_size: float
    input_flow: float = 0.0
    flow_duration: float = 0.0
    initial_population: int = 0

    def validate(self):
        if self.width <= 0 or self.length <= 0:
            raise ValueError("room dimensions must be positive")
        if self.exit_size <= 0:
            raise ValueError("exit_size must be positive")
        if self.exit_size > self.width:
            raise ValueError("exit_size must not exceed room width")
        if self.input_flow < 0 or self.flow_duration < 0:
            raise ValueError("flow parameters must be non-negative")
        if self.initial_population < 0:
            raise ValueError("initial_population must be non-negative")

    def as_inputs(self):
        return [self.width, self.length, self.exit_size,
                self.input_flow, self.flow_duration, float(self.initial_population)]


@dataclass
class RoomMetrics:
    tt: float
    avg_exit_time: float
    avg_speed: float
    avg_density: float
    censored: bool = False


def spiral_positions(n, room_width, room_length, spacing=SPIRAL_SPACING,
                     radius=DEFAULT_RADIUS):
    """First n points of a square-spiral lattice around the room center.

    Ring k holds the lattice points at Manhattan distance k (a diamond),
    wound counterclockwise starting from (+k, 0). Points are clamped into
    the room inset by the agent radius, so beyond the room capacity they
    pile up at the walls (the simulation untangles them).
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if spacing <= 0:
        raise ValueError("spacing must be positive")
    if room_width <= 0 or room_length <= 0:
        raise ValueError("room dimensions must be positive")
    cx, cy = room_width / 2.0, room_length / 2.0
    lo_x, hi_x = radius, max(radius, room_width - radius)
    lo_y, hi_y = radius, max(radius, room_length - radius)
    out = []
    if n == 0:
        return out
    out.append(np.array([cx, cy]))
    k = 1
    while len(out) < n:
        # ring k: start at (+k, 0), walk counterclockwise
        i, j = k, 0
        for di, dj in ((-1, 1), (-1, -1), (1, -1), (1, 1)):
            for _ in range(k):
                x = min(hi_x, max(lo_x, cx + i * spacing))
                y = min(hi_y, max(lo_y, cy + j * spacing))
                out.append(np.array([x, y]))
                if len(out) == n:
                    return out
                i += di
                j += dj
        k += 1
    return out


def flow_spawn_count(f, F, t, dt, accumulator):
    """Fractional-accumulation spawning: while t < F the accumulator grows by
    f*dt; the integer part spawns now. Returns (spawn_now, accumulator')."""
    if f < 0 or F < 0 or t < 0 or dt <= 0:
        raise ValueError("invalid flow parameters")
    if f == 0 or t >= F:
        return 0, accumulator
    accumulator += f * dt
    spawn = int(accumulator)
    return spawn, accumulator - spawn


def room_walls(width, length, exit_size):
    """Wall segments of a single room: rectangle minus the exit gap at y=l."""
    gx0 = width / 2.0 - exit_size / 2.0
    gx1 = width / 2.0 + exit_size / 2.0
    walls = [
        (0.0, 0.0, width, 0.0),
        (0.0, 0.0, 0.0, length),
        (width, 0.0, width, length),
    ]
    if gx0 > 1e-9:
        walls.append((0.0, length, gx0, length))
    if gx1 < width - 1e-9:
        walls.append((gx1, length, width, length))
    return np.array(walls)


def room_exit_segment(width, length, exit_size):
    gx0 = width / 2.0 - exit_size / 2.0
    gx1 = width / 2.0 + exit_size / 2.0
    return (np.array([gx0, length]), np.array([gx1, length]))


def _spawn_position(sim, width, rng, radius):
    """Seeded spawn along the entrance band (y=radius): re-drawn up to 10
    times on overlap with an existing agent, then placed anyway."""
    lo, hi = radius, max(radius, width - radius)
    pos = None
    for _ in range(10):
        pos = np.array([rng.uniform(lo, hi), radius])
        act = sim.active[: sim.n]
        if sim.n == 0 or not np.any(act):
            return pos
        d = np.linalg.norm(sim.pos[: sim.n][act] - pos, axis=1)
        if np.all(d >= 2 * radius):
            return pos
    return pos


def _finish_metrics(sim, censored):
    exited = sim.exited_at[: sim.n]
    exited = exited[~np.isnan(exited)]
    if censored:
        tt = sim.cfg.max_sim_time
    elif exited.size:
        tt = float(exited.max())
    else:
        tt = 0.0
    avg_exit = float(exited.mean()) if exited.size else 0.0
    avg_speed = sim.speed_sum / sim.agent_ticks if sim.agent_ticks else 0.0
    avg_density = (sim.density_time_sum / sim.occupied_time
                   if sim.occupied_time > 0 else 0.0)
    return RoomMetrics(tt=tt, avg_exit_time=avg_exit, avg_speed=avg_speed,
                       avg_density=avg_density, censored=censored)


def run_room(spec: RoomSpec, cfg: SimConfig) -> RoomMetrics:
    """Simulate one rectangular room to completion (or the time cap)."""
    spec.validate()
    walls = room_walls(spec.width, spec.length, spec.exit_size)
    exit_seg = room_exit_segment(spec.width, spec.length, spec.exit_size)
    sim = Simulation(walls, cfg, walkable_area=spec.width * spec.length)
    for p in spiral_positions(spec.initial_population, spec.width, spec.length):
        sim.add_agent(p, [exit_seg])

    f, F = spec.input_flow, spec.flow_duration
    acc = 0.0
    while True:
        spawning = f > 0 and sim.time < F
        if spawning:
            count, acc = flow_spawn_count(f, F, sim.time, cfg.dt, acc)
            for _ in range(count):
                pos = _spawn_position(sim, spec.width, sim.rng, DEFAULT_RADIUS)
                sim.add_agent(pos, [exit_seg])
        if sim.active_count == 0 and not spawning:
            break
        if sim.time >= cfg.max_sim_time:
            return _finish_metrics(sim, censored=True)
        sim.step()
    return _finish_metrics(sim, censored=False)


# ---------------------------------------------------------------------------
# Multi-room chain layouts


@dataclass
class PlacedRoom:
    id: str
    x0: float
    y0: float
    x1: float
    y1: float

    @property
    def area(self):
        return (self.x1 - self.x0) * (self.y1 - self.y0)


@dataclass
class Door:
    a: np.ndarray
    b: np.ndarray
    from_id: str
    to_id: str | None  # None = leads outside


@dataclass
class ChainLayout:
    rooms: list[PlacedRoom]
    doors: list[Door]
    walls: np.ndarray = field(default=None)
    specs: dict = field(default_factory=dict)
    populations: dict = field(default_factory=dict)

    @property
    def walkable_area(self):
        return sum(r.area for r in self.rooms)


def chain_layout(specs, ids=None, populations=None) -> ChainLayout:
    """Stack rooms along +y, centered on x=0, door gaps on shared walls.

    specs: RoomSpec per room, in travel order; room k's exit_size is the
    width of the door into room k+1 (the last room's exit leads outside).
    """
    if ids is None:
        ids = [f"r{k}" for k in range(len(specs))]
    rooms = []
    doors = []
    y = 0.0
    for k, spec in enumerate(specs):
        spec.validate()
        rooms.append(PlacedRoom(ids[k], -spec.width / 2.0, y,
                                spec.width / 2.0, y + spec.length))
        y += spec.length
        es = spec.exit_size
        if k + 1 < len(specs):
            es = min(es, specs[k + 1].width)
            to = ids[k + 1]
        else:
            to = None
        doors.append(Door(np.array([-es / 2.0, y]), np.array([es / 2.0, y]),
                          ids[k], to))
    walls = []
    for k, (spec, room) in enumerate(zip(specs, rooms)):
        walls.append((room.x0, room.y0, room.x0, room.y1))
        walls.append((room.x1, room.y0, room.x1, room.y1))
        # bottom edge: solid unless a door from the previous room covers it
        gap = doors[k - 1] if k > 0 else None
        walls.extend(_edge_with_gap(room.x0, room.x1, room.y0, gap))
        walls.extend(_edge_with_gap(room.x0, room.x1, room.y1, doors[k]))
    if populations is None:
        pops = {rid: spec.initial_population
                for rid, spec in zip(ids, specs)}
    elif isinstance(populations, dict):
        pops = dict(populations)
    else:  # sequence aligned with specs
        pops = dict(zip(ids, populations))
    return ChainLayout(rooms=rooms, doors=doors, walls=np.array(walls),
                       specs=dict(zip(ids, specs)), populations=pops)


def _edge_with_gap(x0, x1, y, door):
    if door is None:
        return [(x0, y, x1, y)]
    gx0, gx1 = sorted((door.a[0], door.b[0]))
    gx0, gx1 = max(x0, gx0), min(x1, gx1)
    segs = []
    if gx0 > x0 + 1e-9:
        segs.append((x0, y, gx0, y))
    if gx1 < x1 - 1e-9:
        segs.append((gx1, y, x1, y))
    return segs


@dataclass
class EnvironmentMetrics:
    tt: float
    avg_exit_time: float
    censored: bool
    room_exit_events: list = field(default_factory=list)  # (room_id, time)


def run_environment(layout: ChainLayout, cfg: SimConfig) -> EnvironmentMetrics:
    """Simulate a chain layout: each room's population spirals at its center
    and follows the door sequence to the outside."""
    sim = Simulation(layout.walls, cfg, walkable_area=layout.walkable_area)
    door_of = {d.from_id: d for d in layout.doors}
    order = [r.id for r in layout.rooms]
    route_rooms = {}
    for idx, rid in enumerate(order):
        segs = []
        rids = []
        j = idx
        while True:
            d = door_of[order[j]]
            segs.append((d.a, d.b))
            rids.append(order[j])
            if d.to_id is None:
                break
            j = order.index(d.to_id)
        route_rooms[rid] = (segs, rids)

    agent_routes = []
    for rid, room in zip(order, layout.rooms):
        n = layout.populations.get(rid, 0)
        spec = layout.specs[rid]
        pts = spiral_positions(n, spec.width, spec.length)
        segs, rids = route_rooms[rid]
        for p in pts:
            world_p = np.array([room.x0 + p[0], room.y0 + p[1]])
            i = sim.add_agent(world_p, segs)
            agent_routes.append(rids)

    censored = sim.run()
    events = [(agent_routes[i][gi], t) for (i, gi, t) in sim.goal_events
              if gi < len(agent_routes[i])]
    exited = sim.exited_at[: sim.n]
    exited = exited[~np.isnan(exited)]
    tt = cfg.max_sim_time if censored else (float(exited.max()) if exited.size else 0.0)
    avg_exit = float(exited.mean()) if exited.size else 0.0
    return EnvironmentMetrics(tt=tt, avg_exit_time=avg_exit, censored=censored,
                              room_exit_events=events)
