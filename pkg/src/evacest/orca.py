"""ORCA collision avoidance: half-plane constraint construction and the
incremental 2D linear program that picks each agent's new velocity.

Constraints are stored as rows of a float64 array with layout
(point_x, point_y, dir_x, dir_y). The feasible side is the left of the
direction vector: det(dir, point - v) <= 0. The public API converts to and
from the (point, normal) representation, where normal is the unit vector
pointing into the permitted half plane: feasible iff (v - point) . normal >= 0
with normal = rot90(dir).
"""

import numpy as np
from numba import njit

EPS = 1e-10


@njit(cache=True)
def _lp1(lines, n_lines, line_no, radius, opt_x, opt_y, dir_opt, result):
    """Optimize along line line_no subject to lines[0:line_no] and the disc.

    Returns True on success, writing the optimum into result.
    """
    px = lines[line_no, 0]
    py = lines[line_no, 1]
    dx = lines[line_no, 2]
    dy = lines[line_no, 3]

    dot = px * dx + py * dy
    disc = dot * dot + radius * radius - (px * px + py * py)
    if disc < 0.0:
        # max_speed disc fully invalidates this line
        return False
    sqrt_disc = np.sqrt(disc)
    t_left = -dot - sqrt_disc
    t_right = -dot + sqrt_disc

    for i in range(line_no):
        denom = dx * lines[i, 3] - dy * lines[i, 2]
        numer = lines[i, 2] * (py - lines[i, 1]) - lines[i, 3] * (px - lines[i, 0])
        if abs(denom) <= EPS:
            if numer < 0.0:
                return False
            continue
        t = numer / denom
        if denom >= 0.0:
            if t < t_right:
                t_right = t
        else:
            if t > t_left:
                t_left = t
        if t_left > t_right:
            return False

    if dir_opt:
        if opt_x * dx + opt_y * dy > 0.0:
            t = t_right
        else:
            t = t_left
    else:
        t = dx * (opt_x - px) + dy * (opt_y - py)
        if t < t_left:
            t = t_left
        elif t > t_right:
            t = t_right

    result[0] = px + t * dx
    result[1] = py + t * dy
    return True


@njit(cache=True)
def _lp2(lines, n_lines, radius, opt_x, opt_y, dir_opt, result):
    """Incremental LP over lines within the disc of the given radius.

    Returns the number of the first failing line, or n_lines on success.
    """
    if dir_opt:
        # opt is a unit direction; maximize along it
        result[0] = opt_x * radius
        result[1] = opt_y * radius
    elif opt_x * opt_x + opt_y * opt_y > radius * radius:
        inv = radius / np.sqrt(opt_x * opt_x + opt_y * opt_y)
        result[0] = opt_x * inv
        result[1] = opt_y * inv
    else:
        result[0] = opt_x
        result[1] = opt_y

    for i in range(n_lines):
        det = lines[i, 2] * (lines[i, 1] - result[1]) - lines[i, 3] * (lines[i, 0] - result[0])
        if det > 0.0:
            tmp_x = result[0]
            tmp_y = result[1]
            if not _lp1(lines, n_lines, i, radius, opt_x, opt_y, dir_opt, result):
                result[0] = tmp_x
                result[1] = tmp_y
                return i
    return n_lines


@njit(cache=True)
def _lp3(lines, n_lines, n_hard, begin_line, radius, result, proj):
    """Back-off LP: minimize the maximum violation of lines[begin_line:].

    The first n_hard lines (static obstacles) stay hard constraints; proj is
    caller-provided scratch of shape (n_lines, 4).
    """
    distance = 0.0
    for i in range(begin_line, n_lines):
        det_i = lines[i, 2] * (lines[i, 1] - result[1]) - lines[i, 3] * (lines[i, 0] - result[0])
        if det_i > distance:
            n_proj = 0
            for k in range(n_hard):
                proj[n_proj, 0] = lines[k, 0]
                proj[n_proj, 1] = lines[k, 1]
                proj[n_proj, 2] = lines[k, 2]
                proj[n_proj, 3] = lines[k, 3]
                n_proj += 1
            for j in range(n_hard, i):
                det = lines[i, 2] * lines[j, 3] - lines[i, 3] * lines[j, 2]
                if abs(det) <= EPS:
                    if lines[i, 2] * lines[j, 2] + lines[i, 3] * lines[j, 3] > 0.0:
                        continue
                    px = 0.5 * (lines[i, 0] + lines[j, 0])
                    py = 0.5 * (lines[i, 1] + lines[j, 1])
                else:
                    t = (lines[j, 2] * (lines[i, 1] - lines[j, 1])
                         - lines[j, 3] * (lines[i, 0] - lines[j, 0])) / det
                    px = lines[i, 0] + t * lines[i, 2]
                    py = lines[i, 1] + t * lines[i, 3]
                ddx = lines[j, 2] - lines[i, 2]
                ddy = lines[j, 3] - lines[i, 3]
                norm = np.sqrt(ddx * ddx + ddy * ddy)
                if norm <= EPS:
                    continue
                proj[n_proj, 0] = px
                proj[n_proj, 1] = py
                proj[n_proj, 2] = ddx / norm
                proj[n_proj, 3] = ddy / norm
                n_proj += 1
            tmp_x = result[0]
            tmp_y = result[1]
            if _lp2(proj, n_proj, radius, -lines[i, 3], lines[i, 2], True, result) < n_proj:
                result[0] = tmp_x
                result[1] = tmp_y
            distance = lines[i, 2] * (lines[i, 1] - result[1]) - lines[i, 3] * (lines[i, 0] - result[0])


@njit(cache=True)
def _solve(lines, n_lines, n_hard, pref_x, pref_y, max_speed, result, proj):
    """Full solve: LP2 then the back-off LP3 on infeasibility.

    Returns True if the fallback was activated.
    """
    fail = _lp2(lines, n_lines, max_speed, pref_x, pref_y, False, result)
    if fail < n_lines:
        _lp3(lines, n_lines, n_hard, fail, max_speed, result, proj)
        return True
    return False


@njit(cache=True)
def _agent_line(px, py, vx, vy, ovx, ovy, comb_r, tau, dt, line):
    """ORCA half-plane induced on an agent by one neighbor.

    (px, py): neighbor position relative to the agent; (vx, vy): own velocity;
    (ovx, ovy): neighbor velocity; comb_r: sum of radii. The agent takes half
    of the correction u (reciprocity).
    """
    rvx = vx - ovx
    rvy = vy - ovy
    dist2 = px * px + py * py
    r2 = comb_r * comb_r

    if dist2 > r2:
        inv_tau = 1.0 / tau
        # vector from truncation-cone center to relative velocity
        wx = rvx - px * inv_tau
        wy = rvy - py * inv_tau
        w_len2 = wx * wx + wy * wy
        dot1 = wx * px + wy * py
        if dot1 < 0.0 and dot1 * dot1 > r2 * w_len2:
            # project on the cut-off circle
            w_len = np.sqrt(w_len2)
            ux = wx / w_len
            uy = wy / w_len
            line[2] = uy
            line[3] = -ux
            mag = comb_r * inv_tau - w_len
            cx = mag * ux
            cy = mag * uy
        else:
            # project on a leg of the cone
            leg = np.sqrt(dist2 - r2)
            if px * wy - py * wx > 0.0:
                line[2] = (px * leg - py * comb_r) / dist2
                line[3] = (px * comb_r + py * leg) / dist2
            else:
                line[2] = -(px * leg + py * comb_r) / dist2
                line[3] = (px * comb_r - py * leg) / dist2
            dot2 = rvx * line[2] + rvy * line[3]
            cx = dot2 * line[2] - rvx
            cy = dot2 * line[3] - rvy
    else:
        # already colliding: escape within one timestep
        inv_dt = 1.0 / dt
        wx = rvx - px * inv_dt
        wy = rvy - py * inv_dt
        w_len = np.sqrt(wx * wx + wy * wy)
        if w_len <= EPS:
            # coincident relative state; push along the separation axis
            d = np.sqrt(dist2)
            if d <= EPS:
                ux = 1.0
                uy = 0.0
            else:
                ux = -px / d
                uy = -py / d
            line[2] = uy
            line[3] = -ux
            cx = comb_r * inv_dt * ux
            cy = comb_r * inv_dt * uy
        else:
            ux = wx / w_len
            uy = wy / w_len
            line[2] = uy
            line[3] = -ux
            mag = comb_r * inv_dt - w_len
            cx = mag * ux
            cy = mag * uy

    line[0] = vx + 0.5 * cx
    line[1] = vy + 0.5 * cy


@njit(cache=True)
def _wall_line(px, py, wax, way, wbx, wby, radius, tau_obst, dt, line):
    """Half-plane keeping the agent at (px, py) from closing on a wall segment.

    Full responsibility (the wall does not move). Returns False if the
    segment is degenerate w.r.t. the agent position.
    """
    ex = wbx - wax
    ey = wby - way
    e2 = ex * ex + ey * ey
    if e2 <= EPS:
        t = 0.0
    else:
        t = ((px - wax) * ex + (py - way) * ey) / e2
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
    cx = wax + t * ex
    cy = way + t * ey
    dx = px - cx
    dy = py - cy
    dist = np.sqrt(dx * dx + dy * dy)
    if dist <= EPS:
        return False
    nx = dx / dist
    ny = dy / dist
    if dist > radius:
        # do not close the gap faster than it can be covered in tau_obst
        off = -(dist - radius) / tau_obst
    else:
        # penetrating: move out within one step
        off = (radius - dist) / dt
    line[0] = off * nx
    line[1] = off * ny
    line[2] = ny
    line[3] = -nx
    return True


@njit(cache=True)
def compute_velocities(pos, vel, radius, max_speed, active, pref,
                       walls, dt, tau, tau_obst, neighbor_radius,
                       new_vel, fallback):
    """New ORCA velocities for every active agent (one tick, old state only).

    walls: (m, 4) array of segments (ax, ay, bx, by). Writes new_vel in place
    and flags agents whose LP needed the infeasibility fallback.
    """
    n = pos.shape[0]
    n_walls = walls.shape[0]
    nr2 = neighbor_radius * neighbor_radius
    lines = np.empty((n + n_walls, 4))
    proj = np.empty((n + n_walls, 4))
    result = np.empty(2)
    for i in range(n):
        if not active[i]:
            new_vel[i, 0] = 0.0
            new_vel[i, 1] = 0.0
            continue
        n_lines = 0
        # wall constraints first: they stay hard in the fallback LP
        for w in range(n_walls):
            # cheap reject: segment AABB vs neighbor radius
            lo_x = min(walls[w, 0], walls[w, 2]) - neighbor_radius
            hi_x = max(walls[w, 0], walls[w, 2]) + neighbor_radius
            lo_y = min(walls[w, 1], walls[w, 3]) - neighbor_radius
            hi_y = max(walls[w, 1], walls[w, 3]) + neighbor_radius
            if pos[i, 0] < lo_x or pos[i, 0] > hi_x or pos[i, 1] < lo_y or pos[i, 1] > hi_y:
                continue
            if _wall_line(pos[i, 0], pos[i, 1],
                          walls[w, 0], walls[w, 1], walls[w, 2], walls[w, 3],
                          radius[i], tau_obst, dt, lines[n_lines]):
                n_lines += 1
        n_hard = n_lines
        for j in range(n):
            if j == i or not active[j]:
                continue
            rx = pos[j, 0] - pos[i, 0]
            ry = pos[j, 1] - pos[i, 1]
            if rx * rx + ry * ry > nr2:
                continue
            if rx * rx + ry * ry < 1e-12:
                # coincident agents: break the symmetry by index so the
                # escape constraints push the pair apart, not in lockstep
                rx = 1e-4 if j > i else -1e-4
                ry = 0.0
            _agent_line(rx, ry, vel[i, 0], vel[i, 1], vel[j, 0], vel[j, 1],
                        radius[i] + radius[j], tau, dt, lines[n_lines])
            n_lines += 1
        fallback[i] = _solve(lines, n_lines, n_hard,
                             pref[i, 0], pref[i, 1], max_speed[i], result, proj)
        new_vel[i, 0] = result[0]
        new_vel[i, 1] = result[1]


def lines_to_constraints(lines):
    """(point, dir) rows -> list of (point, normal) pairs."""
    out = []
    for row in np.asarray(lines, dtype=float):
        px, py, dx, dy = row
        out.append((np.array([px, py]), np.array([-dy, dx])))
    return out


def constraints_to_lines(constraints):
    """List of (point, normal) pairs -> (m, 4) line array."""
    lines = np.empty((len(constraints), 4))
    for k, (point, normal) in enumerate(constraints):
        nx, ny = float(normal[0]), float(normal[1])
        lines[k, 0] = float(point[0])
        lines[k, 1] = float(point[1])
        lines[k, 2] = ny
        lines[k, 3] = -nx
    return lines


def orca_constraints(position, velocity, radius, neighbors, walls, cfg):
    """Half-plane constraints for one agent.

    neighbors: iterable of (position, velocity, radius) triples already
    filtered to the neighbor radius; walls: iterable of ((ax, ay), (bx, by)).
    Returns a list of (point, normal) pairs, wall constraints first.
    """
    lines = []
    line = np.empty(4)
    px, py = float(position[0]), float(position[1])
    vx, vy = float(velocity[0]), float(velocity[1])
    for (a, b) in walls:
        if _wall_line(px, py, float(a[0]), float(a[1]), float(b[0]), float(b[1]),
                      radius, cfg.tau_obst, cfg.dt, line):
            lines.append(line.copy())
    for (opos, ovel, orad) in neighbors:
        _agent_line(float(opos[0]) - px, float(opos[1]) - py, vx, vy,
                    float(ovel[0]), float(ovel[1]), radius + orad,
                    cfg.tau, cfg.dt, line)
        lines.append(line.copy())
    return lines_to_constraints(lines)


def solve_velocity(constraints, pref, max_speed):
    """Velocity in the max_speed disc closest to pref under the constraints.

    Falls back to minimizing the maximum violation when infeasible; the
    second return value reports whether the fallback fired.
    """
    if max_speed <= 0:
        raise ValueError("max_speed must be positive")
    lines = constraints_to_lines(constraints)
    result = np.empty(2)
    proj = np.empty_like(lines)
    used_fallback = _solve(lines, len(constraints), 0,
                           float(pref[0]), float(pref[1]), float(max_speed), result, proj)
    return result.copy(), bool(used_fallback)
