"""Graph-level evacuation-time estimation.

Rooms are evaluated in topological order. Each room gets a per-room
surrogate prediction plus a set of propagated timing quantities:

- fet: time for the first agent to leave the room, ignoring upstream rooms
- git: when agents first start arriving (min over upstream rooms' gfet)
- ift: when agents stop arriving (worst-case upstream drain time)
- F/f: the arrival window length and mean arrival rate fed to the surrogate
- pop: final population the room handles (own ip plus routed arrivals)
- gfet: fet shifted by git, i.e. first exit in environment time

The environment total is the slowest exit room: max over exit rooms of
(git + tt).
"""

import math
import time
from dataclasses import dataclass, field

from .dataset import PARAM_RANGES

MAX_SPEED = 1.2
DEGENERATE_WINDOW = 0.1  # seconds; stands in for F when a window collapses

# inference-time input bounds, in surrogate input order
CLAMP_BOUNDS = [
    PARAM_RANGES["width"],
    PARAM_RANGES["length"],
    PARAM_RANGES["exit_size"],
    PARAM_RANGES["input_flow"],
    PARAM_RANGES["flow_duration"],
    (0.0, 99.0),
]
INPUT_NAMES = ["width", "length", "exit_size", "input_flow", "flow_duration",
               "initial_population"]


@dataclass
class RoomEstimate:
    room_id: str
    fet: float
    gfet: float
    git: float
    ift: float
    F: float
    f: float
    pop: float
    tt: float
    avg_exit_time: float = None

    def to_dict(self):
        return {"room_id": self.room_id, "fet": self.fet, "gfet": self.gfet,
                "git": self.git, "ift": self.ift, "F": self.F, "f": self.f,
                "pop": self.pop, "tt": self.tt,
                "avg_exit_time": self.avg_exit_time}


@dataclass
class EnvironmentEstimate:
    tt_e: float
    avg_exit_time_e: float
    per_room: dict
    warnings: list = field(default_factory=list)
    wall_clock_ms: float = 0.0

    def to_dict(self):
        return {"tt_e": self.tt_e, "avg_exit_time_e": self.avg_exit_time_e,
                "per_room": {k: v.to_dict() for k, v in self.per_room.items()},
                "warnings": list(self.warnings),
                "wall_clock_ms": self.wall_clock_ms}


def fet(length, pop, max_speed=MAX_SPEED, variant="simple"):
    """Time for the first agent to leave a room it starts in."""
    if length <= 0 or max_speed <= 0 or pop < 0:
        raise ValueError("fet needs length > 0, max_speed > 0, pop >= 0")
    if variant == "diamond":
        # starting crowd forms a diamond around the center; its radius
        # shortens the first agent's walk. Empty rooms are crossed in full.
        if pop == 0:
            return length / max_speed
        reduction = max(0.0, 0.6 * math.sqrt(pop) / 2.0)
        return (length / 2.0 - reduction) / max_speed
    if pop == 0:
        return 0.0
    return (length / 2.0) / max_speed


def _clamped_inputs(room_id, inputs, warnings):
    """Clamp surrogate inputs to the training ranges, recording a warning.

    f = F = 0 is the dedicated no-inflow encoding for source rooms and is
    passed through unclamped.
    """
    out = list(inputs)
    offending = []
    for i, ((lo, hi), name) in enumerate(zip(CLAMP_BOUNDS, INPUT_NAMES)):
        if name in ("input_flow", "flow_duration") and \
                inputs[3] == 0.0 and inputs[4] == 0.0:
            continue
        if out[i] < lo:
            out[i] = lo
            offending.append(name)
        elif out[i] > hi:
            out[i] = hi
            offending.append(name)
    if offending:
        warnings.append(f"room {room_id!r}: inputs outside training range "
                        f"clamped: {', '.join(offending)}")
    return out


def _predict(model, room_id, inputs, warnings):
    return float(model.predict([_clamped_inputs(room_id, inputs, warnings)])[0])


def estimate_source_room(room, model, warnings=None, model_avg=None,
                         fet_variant="simple"):
    """Estimate a room with no incoming edges."""
    warnings = warnings if warnings is not None else []
    ip = float(room.initial_population)
    inputs = [room.width, room.length, room.exit_size, 0.0, 0.0, ip]
    tt = _predict(model, room.id, inputs, warnings)
    first = fet(room.length, ip, variant=fet_variant)
    avg = (None if model_avg is None
           else _predict(model_avg, room.id, inputs, warnings))
    return RoomEstimate(room.id, fet=first, gfet=first, git=0.0, ift=0.0,
                        F=0.0, f=0.0, pop=ip, tt=tt, avg_exit_time=avg)


def estimate_dependent_room(room, dependents, model, warnings=None,
                            model_avg=None, fet_variant="simple"):
    """Estimate a room fed by upstream rooms.

    dependents: list of (RoomEstimate, fraction) for each incoming edge.
    """
    warnings = warnings if warnings is not None else []
    git = min(d.gfet for d, _ in dependents)
    ift = max(d.gfet - d.fet + d.tt for d, _ in dependents)
    F = max(ift - git, 0.0)
    incoming = sum(d.pop * frac for d, frac in dependents)
    if F > 0:
        f = incoming / F
    elif incoming > 0:
        # upstream rooms drain instantly: no finite window exists, so use a
        # nominal sub-second window carrying the same total population
        F = DEGENERATE_WINDOW
        f = incoming / F
        warnings.append(f"room {room.id!r}: degenerate arrival window; "
                        f"using F={DEGENERATE_WINDOW}")
    else:
        f = 0.0
    pop = room.initial_population + f * F
    inputs = [room.width, room.length, room.exit_size, f, F,
              float(room.initial_population)]
    tt = _predict(model, room.id, inputs, warnings)
    first = fet(room.length, pop, variant=fet_variant)
    avg = (None if model_avg is None
           else _predict(model_avg, room.id, inputs, warnings))
    return RoomEstimate(room.id, fet=first, gfet=first + git, git=git,
                        ift=ift, F=F, f=f, pop=pop, tt=tt, avg_exit_time=avg)


def estimate_environment(graph, model, model_avg=None, fet_variant="simple"):
    """Evaluate every room and aggregate over the exit rooms."""
    violations = graph.validate()
    if violations:
        raise ValueError("invalid graph: "
                         + "; ".join(v.message for v in violations))
    start = time.perf_counter()
    warnings = []
    rooms = graph.room_map()
    estimates = {}
    for rid in graph.topological_order():
        room = rooms[rid]
        incoming = graph.in_edges(rid)
        if not incoming:
            est = estimate_source_room(room, model, warnings, model_avg,
                                       fet_variant)
        else:
            deps = [(estimates[e.src], e.fraction) for e in incoming]
            est = estimate_dependent_room(room, deps, model, warnings,
                                          model_avg, fet_variant)
        estimates[rid] = est
    exits = [estimates[r.id] for r in graph.exit_rooms()]
    tt_e = max(e.git + e.tt for e in exits)
    avg_e = None
    if model_avg is not None:
        avg_e = sum(e.avg_exit_time + (e.git + e.ift) / 2.0
                    for e in exits) / len(exits)
    wall = (time.perf_counter() - start) * 1000.0
    return EnvironmentEstimate(tt_e=tt_e, avg_exit_time_e=avg_e,
                               per_room=estimates, warnings=warnings,
                               wall_clock_ms=wall)
