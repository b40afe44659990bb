import { describe, expect, it } from "vitest";

import {
  emptyGraph,
  parseGraph,
  serializeGraph,
  wouldCreateCycle,
} from "../src/document.js";
import { rangeWarnings } from "../src/ranges.js";
import {
  addRoom,
  connect,
  fractionSumIssues,
  initialState,
  moveRoom,
  removeEdge,
  removeRoom,
  setEdgeFraction,
  setRoomParam,
} from "../src/state.js";

describe("canvas operations", () => {
  it("add two rooms and connect gives a fraction-1 edge", () => {
    const s = initialState();
    const a = addRoom(s, 10, 10);
    const b = addRoom(s, 200, 10);
    const edge = connect(s, a.id, b.id);
    expect(edge.fraction).toBe(1.0);
    expect(s.graph.edges).toHaveLength(1);
    expect(s.dirty).toBe(true);
  });

  it("connecting a second target renormalizes fractions", () => {
    const s = initialState();
    const a = addRoom(s, 0, 0, "a");
    addRoom(s, 0, 100, "b");
    addRoom(s, 0, 200, "c");
    connect(s, "a", "b");
    connect(s, "a", "c");
    const fractions = s.graph.edges.map((e) => e.fraction);
    expect(fractions[0] + fractions[1]).toBeCloseTo(1.0, 12);
    expect(fractions[0]).toBeCloseTo(0.5, 12);
    expect(a.id).toBe("a");
    expect(fractionSumIssues(s.graph)).toHaveLength(0);
  });

  it("removing a room removes its edges", () => {
    const s = initialState();
    addRoom(s, 0, 0, "a");
    addRoom(s, 0, 100, "b");
    addRoom(s, 0, 200, "c");
    connect(s, "a", "b");
    connect(s, "b", "c");
    removeRoom(s, "b");
    expect(s.graph.rooms.map((r) => r.id)).toEqual(["a", "c"]);
    expect(s.graph.edges).toHaveLength(0);
  });

  it("removing one fan-out target renormalizes the survivors", () => {
    const s = initialState();
    addRoom(s, 0, 0, "a");
    addRoom(s, 0, 100, "b");
    addRoom(s, 0, 200, "c");
    connect(s, "a", "b");
    connect(s, "a", "c");
    removeRoom(s, "c");
    expect(s.graph.edges).toEqual([{ from: "a", to: "b", fraction: 1.0 }]);
  });

  it("refuses a cycle-creating connection with an explanation", () => {
    const s = initialState();
    addRoom(s, 0, 0, "a");
    addRoom(s, 0, 100, "b");
    connect(s, "a", "b");
    expect(() => connect(s, "b", "a")).toThrowError(/cycle/);
    expect(s.graph.edges).toHaveLength(1);
  });

  it("refuses indirect cycles and self loops", () => {
    const s = initialState();
    addRoom(s, 0, 0, "a");
    addRoom(s, 0, 100, "b");
    addRoom(s, 0, 200, "c");
    connect(s, "a", "b");
    connect(s, "b", "c");
    expect(() => connect(s, "c", "a")).toThrowError(/cycle/);
    expect(() => connect(s, "a", "a")).toThrowError(/cycle/);
  });

  it("moveRoom updates layout without marking the estimate stale", () => {
    const s = initialState();
    addRoom(s, 0, 0, "a");
    s.estimateStale = false;
    moveRoom(s, "a", 55, 66);
    expect(s.graph.rooms[0].pos).toEqual({ x: 55, y: 66 });
    expect(s.estimateStale).toBe(false);
    expect(s.dirty).toBe(true);
  });

  it("removeEdge renormalizes remaining fractions", () => {
    const s = initialState();
    addRoom(s, 0, 0, "a");
    addRoom(s, 0, 100, "b");
    addRoom(s, 0, 200, "c");
    connect(s, "a", "b");
    connect(s, "a", "c");
    removeEdge(s, "a", "c");
    expect(s.graph.edges[0].fraction).toBe(1.0);
  });
});

describe("parameter panel", () => {
  it("persists numeric edits", () => {
    const s = initialState();
    addRoom(s, 0, 0, "a");
    setRoomParam(s, "a", "width", "12");
    expect(s.graph.rooms[0].width).toBe(12);
  });

  it("rejects non-numeric input", () => {
    const s = initialState();
    addRoom(s, 0, 0, "a");
    expect(() => setRoomParam(s, "a", "width", "wide")).toThrowError(
      /not a number/
    );
    expect(() => setRoomParam(s, "a", "width", "")).toThrowError(
      /not a number/
    );
    expect(s.graph.rooms[0].width).toBe(10);
  });

  it("rejects non-integer or negative populations", () => {
    const s = initialState();
    addRoom(s, 0, 0, "a");
    expect(() =>
      setRoomParam(s, "a", "initial_population", "2.5")
    ).toThrowError();
    expect(() =>
      setRoomParam(s, "a", "initial_population", "-1")
    ).toThrowError();
  });

  it("warns on values outside the training ranges", () => {
    const s = initialState();
    addRoom(s, 0, 0, "a");
    setRoomParam(s, "a", "exit_size", 6.0);
    let warned = rangeWarnings(s.graph.rooms[0]).map((w) => w.field);
    expect(warned).toEqual(["exit_size"]);
    setRoomParam(s, "a", "width", 25);
    warned = rangeWarnings(s.graph.rooms[0]).map((w) => w.field);
    expect(warned).toContain("width");
  });

  it("in-range values produce no warnings", () => {
    const s = initialState();
    addRoom(s, 0, 0, "a");
    expect(rangeWarnings(s.graph.rooms[0])).toHaveLength(0);
  });

  it("rejects out-of-range edge fractions", () => {
    const s = initialState();
    addRoom(s, 0, 0, "a");
    addRoom(s, 0, 100, "b");
    connect(s, "a", "b");
    expect(() => setEdgeFraction(s, "a", "b", 0)).toThrowError();
    expect(() => setEdgeFraction(s, "a", "b", 1.5)).toThrowError();
    setEdgeFraction(s, "a", "b", 0.7);
    expect(fractionSumIssues(s.graph)).toEqual([{ room: "a", sum: 0.7 }]);
  });
});

describe("document serialization", () => {
  it("serialize/parse round trip is byte identical", () => {
    const s = initialState();
    addRoom(s, 10, 20, "hall");
    addRoom(s, 200, 20, "foyer");
    addRoom(s, 400, 20, "street");
    connect(s, "hall", "foyer");
    connect(s, "foyer", "street");
    setRoomParam(s, "hall", "initial_population", 24);
    const first = serializeGraph(s.graph);
    const second = serializeGraph(parseGraph(first));
    expect(second).toBe(first);
  });

  it("rejects unknown versions and malformed rooms", () => {
    expect(() => parseGraph('{"version":"nope","rooms":[],"edges":[]}'))
      .toThrowError(/version/);
    expect(() =>
      parseGraph(
        '{"version":"evacest-graph-1","rooms":[{"id":"a"}],"edges":[]}'
      )
    ).toThrowError(/missing/);
  });

  it("wouldCreateCycle is purely topological", () => {
    const g = emptyGraph();
    g.rooms = [
      { id: "a", width: 5, length: 5, exit_size: 1, initial_population: 0, pos: { x: 0, y: 0 } },
      { id: "b", width: 5, length: 5, exit_size: 1, initial_population: 0, pos: { x: 0, y: 0 } },
    ];
    g.edges = [{ from: "a", to: "b", fraction: 1 }];
    expect(wouldCreateCycle(g, "b", "a")).toBe(true);
    expect(wouldCreateCycle(g, "a", "b")).toBe(false);
  });
});
