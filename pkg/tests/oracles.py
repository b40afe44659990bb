"""Independent oracles shared by unit and acceptance tests.

These deliberately re-derive expected values by brute force (grid search,
finite differences, recursive graph walks) and never call the code paths
they check.
"""

import numpy as np


def grid_search_velocity(constraints, pref, max_speed, resolution=0.01):
    """Dense grid search for the feasible velocity closest to pref.

    Returns (velocity, found) where found is False when no grid point in the
    disc satisfies every constraint.
    """
    ticks = np.arange(-max_speed, max_speed + resolution / 2, resolution)
    vx, vy = np.meshgrid(ticks, ticks)
    v = np.stack([vx.ravel(), vy.ravel()], axis=1)
    ok = (v ** 2).sum(axis=1) <= max_speed ** 2 + 1e-12
    for point, normal in constraints:
        ok &= (v - np.asarray(point)) @ np.asarray(normal) >= -1e-12
    if not ok.any():
        return np.zeros(2), False
    cand = v[ok]
    d2 = ((cand - np.asarray(pref)) ** 2).sum(axis=1)
    return cand[int(np.argmin(d2))], True


def random_feasible_constraints(rng, max_speed, n_constraints):
    """Constraint set guaranteed feasible: every half plane contains a common
    witness point drawn inside the disc."""
    ang = rng.uniform(0, 2 * np.pi)
    r = rng.uniform(0, max_speed * 0.8)
    witness = np.array([r * np.cos(ang), r * np.sin(ang)])
    constraints = []
    for _ in range(n_constraints):
        theta = rng.uniform(0, 2 * np.pi)
        normal = np.array([np.cos(theta), np.sin(theta)])
        point = witness - normal * rng.uniform(0.0, 1.0)
        constraints.append((point, normal))
    return constraints, witness


def finite_difference_gradient(f, weights, h=1e-5):
    """Central finite differences of scalar f w.r.t. a list of arrays."""
    grads = []
    for w in weights:
        g = np.zeros_like(w)
        it = np.nditer(w, flags=["multi_index"])
        while not it.finished:
            idx = it.multi_index
            orig = w[idx]
            w[idx] = orig + h
            fp = f()
            w[idx] = orig - h
            fm = f()
            w[idx] = orig
            g[idx] = (fp - fm) / (2 * h)
            it.iternext()
        grads.append(g)
    return grads


def recursive_estimate_oracle(rooms, edges, stub_tt, max_speed=1.2):
    """Independent recursive evaluation of the room-graph heuristics.

    rooms: dict id -> dict(width, length, exit_size, ip); edges: list of
    (from, to, fraction); stub_tt: callable(inputs 6-list) -> tt. Returns
    dict id -> dict of (fet, gfet, git, ift, F, f, pop, tt) plus the
    environment total under key "__tt_e__".
    """
    deps = {rid: [] for rid in rooms}
    outs = {rid: [] for rid in rooms}
    for frm, to, frac in edges:
        deps[to].append((frm, frac))
        outs[frm].append(to)
    memo = {}

    def eval_room(rid):
        if rid in memo:
            return memo[rid]
        room = rooms[rid]
        if not deps[rid]:
            f, F, git, ift = 0.0, 0.0, 0.0, 0.0
            pop = float(room["ip"])
        else:
            ds = [eval_room(d) for d, _ in deps[rid]]
            git = min(d["gfet"] for d in ds)
            ift = max(d["gfet"] - d["fet"] + d["tt"] for d in ds)
            F = max(ift - git, 0.0)
            incoming = sum(eval_room(d)["pop"] * frac for d, frac in deps[rid])
            if F > 0:
                f = incoming / F
            elif incoming > 0:
                F = 0.1
                f = incoming / F
            else:
                f = 0.0
            pop = room["ip"] + f * F
        tt = stub_tt([room["width"], room["length"], room["exit_size"],
                      f, F, float(room["ip"])])
        fet = 0.0 if pop == 0 else (room["length"] / 2.0) / max_speed
        gfet = fet + git
        memo[rid] = dict(fet=fet, gfet=gfet, git=git, ift=ift, F=F, f=f,
                         pop=pop, tt=tt)
        return memo[rid]

    exit_rooms = [rid for rid in rooms if not outs[rid]]
    for rid in rooms:
        eval_room(rid)
    result = dict(memo)
    result["__tt_e__"] = max(memo[r]["git"] + memo[r]["tt"] for r in exit_rooms)
    return result
