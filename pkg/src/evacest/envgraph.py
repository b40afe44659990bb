"""Room-connectivity graph model.

An environment is a directed acyclic graph of rooms. Edges point in the
travel direction (from a room toward the exit it empties through) and carry
the fraction of that room's crowd taking the edge. Rooms with no outgoing
edges are exit rooms that empty directly outside.
"""

import heapq
import json
from dataclasses import dataclass, field

GRAPH_VERSION = "evacest-graph-1"


@dataclass
class Room:
    id: str
    width: float
    length: float
    exit_size: float
    initial_population: int = 0
    pos: tuple = (0.0, 0.0)


@dataclass
class Edge:
    src: str
    dst: str
    fraction: float


@dataclass
class Violation:
    """One validation problem, positioned at a room or edge."""
    code: str
    message: str
    room: str = None
    edge: tuple = None


@dataclass
class Graph:
    rooms: list = field(default_factory=list)
    edges: list = field(default_factory=list)

    def room_map(self):
        return {r.id: r for r in self.rooms}

    def out_edges(self, room_id):
        return [e for e in self.edges if e.src == room_id]

    def in_edges(self, room_id):
        return [e for e in self.edges if e.dst == room_id]

    def exit_rooms(self):
        """Rooms with no outgoing edges empty directly outside."""
        has_out = {e.src for e in self.edges}
        return [r for r in self.rooms if r.id not in has_out]

    # --- validation ------------------------------------------------------

    def validate(self):
        """Return a list of Violations; empty means the graph is usable."""
        v = []
        seen = set()
        for r in self.rooms:
            if r.id in seen:
                v.append(Violation("duplicate-room", f"duplicate room id {r.id!r}",
                                   room=r.id))
            seen.add(r.id)
            if r.width <= 0 or r.length <= 0:
                v.append(Violation("bad-dimensions",
                                   f"room {r.id!r} has non-positive dimensions",
                                   room=r.id))
            if r.exit_size <= 0:
                v.append(Violation("bad-exit",
                                   f"room {r.id!r} has non-positive exit size",
                                   room=r.id))
            elif r.width > 0 and r.exit_size > max(r.width, r.length):
                v.append(Violation("bad-exit",
                                   f"room {r.id!r} exit wider than the room",
                                   room=r.id))
            if r.initial_population < 0:
                v.append(Violation("bad-population",
                                   f"room {r.id!r} has negative population",
                                   room=r.id))
        ids = {r.id for r in self.rooms}
        pairs = set()
        for e in self.edges:
            key = (e.src, e.dst)
            if e.src not in ids or e.dst not in ids:
                v.append(Violation("dangling-edge",
                                   f"edge {key} references a missing room",
                                   edge=key))
                continue
            if e.src == e.dst:
                v.append(Violation("self-loop", f"edge {key} is a self loop",
                                   edge=key))
            if key in pairs:
                v.append(Violation("duplicate-edge", f"duplicate edge {key}",
                                   edge=key))
            pairs.add(key)
            if not (0.0 < e.fraction <= 1.0):
                v.append(Violation("bad-fraction",
                                   f"edge {key} fraction {e.fraction} "
                                   "outside (0, 1]",
                                   edge=key))
        for r in self.rooms:
            total = sum(e.fraction for e in self.out_edges(r.id))
            if self.out_edges(r.id) and abs(total - 1.0) > 1e-9:
                v.append(Violation("fractions-sum",
                                   f"room {r.id!r} outgoing fractions sum to "
                                   f"{total}, expected 1",
                                   room=r.id))
        if not any(x.code == "dangling-edge" for x in v):
            if self.topological_order() is None:
                v.append(Violation("cycle", "graph contains a cycle"))
        return v

    def topological_order(self):
        """Kahn's algorithm, ties broken by room id; None if cyclic."""
        indeg = {r.id: 0 for r in self.rooms}
        for e in self.edges:
            indeg[e.dst] += 1
        heap = [rid for rid, d in indeg.items() if d == 0]
        heapq.heapify(heap)
        order = []
        while heap:
            rid = heapq.heappop(heap)
            order.append(rid)
            for e in self.out_edges(rid):
                indeg[e.dst] -= 1
                if indeg[e.dst] == 0:
                    heapq.heappush(heap, e.dst)
        if len(order) != len(self.rooms):
            return None
        return order

    # --- serialization ---------------------------------------------------

    def to_dict(self):
        return {
            "version": GRAPH_VERSION,
            "rooms": [{"id": r.id, "width": r.width, "length": r.length,
                       "exit_size": r.exit_size,
                       "initial_population": r.initial_population,
                       "pos": {"x": r.pos[0], "y": r.pos[1]}}
                      for r in self.rooms],
            "edges": [{"from": e.src, "to": e.dst, "fraction": e.fraction}
                      for e in self.edges],
        }

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict):
            raise ValueError("graph document must be a JSON object")
        if d.get("version") != GRAPH_VERSION:
            raise ValueError(f"unsupported graph version: {d.get('version')}")
        rooms = []
        for i, rd in enumerate(d.get("rooms", [])):
            try:
                pos = rd.get("pos", {"x": 0.0, "y": 0.0})
                rooms.append(Room(str(rd["id"]), float(rd["width"]),
                                  float(rd["length"]), float(rd["exit_size"]),
                                  int(rd.get("initial_population", 0)),
                                  (float(pos["x"]), float(pos["y"]))))
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"rooms[{i}]: {exc}") from exc
        edges = []
        for i, ed in enumerate(d.get("edges", [])):
            try:
                edges.append(Edge(str(ed["from"]), str(ed["to"]),
                                  float(ed["fraction"])))
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"edges[{i}]: {exc}") from exc
        return cls(rooms, edges)

    def dumps(self):
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def loads(cls, text):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(doc)

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.dumps())

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.loads(fh.read())
