/** Editor state and the canvas tool operations that mutate it. */

import {
  EdgeDoc,
  GraphDoc,
  RoomDoc,
  emptyGraph,
  wouldCreateCycle,
} from "./document.js";

export interface EstimateDoc {
  tt_e: number;
  avg_exit_time_e: number;
  per_room: Array<Record<string, unknown>>;
  warnings: string[];
}

export type Selection =
  | { kind: "room"; id: string }
  | { kind: "edge"; from: string; to: string }
  | null;

export interface EditorState {
  graph: GraphDoc;
  selection: Selection;
  dirty: boolean;
  lastEstimate: EstimateDoc | null;
  /** True when lastEstimate predates the latest edit. */
  estimateStale: boolean;
}

export function initialState(): EditorState {
  return {
    graph: emptyGraph(),
    selection: null,
    dirty: false,
    lastEstimate: null,
    estimateStale: false,
  };
}

function touch(state: EditorState): void {
  state.dirty = true;
  state.estimateStale = true;
}

const DEFAULT_ROOM = { width: 10, length: 10, exit_size: 2.0 };

export function addRoom(
  state: EditorState,
  x: number,
  y: number,
  id?: string
): RoomDoc {
  let roomId = id;
  if (!roomId) {
    let n = state.graph.rooms.length + 1;
    while (state.graph.rooms.some((r) => r.id === `room-${n}`)) n += 1;
    roomId = `room-${n}`;
  }
  if (state.graph.rooms.some((r) => r.id === roomId)) {
    throw new Error(`duplicate room id: ${roomId}`);
  }
  const room: RoomDoc = {
    id: roomId,
    ...DEFAULT_ROOM,
    initial_population: 0,
    pos: { x, y },
  };
  state.graph.rooms.push(room);
  state.selection = { kind: "room", id: roomId };
  touch(state);
  return room;
}

export function moveRoom(
  state: EditorState,
  id: string,
  x: number,
  y: number
): void {
  const room = state.graph.rooms.find((r) => r.id === id);
  if (!room) throw new Error(`unknown room: ${id}`);
  room.pos = { x, y };
  state.dirty = true; // layout-only change; estimate unaffected
}

/**
 * Connect two rooms. Refuses cycles. The new edge gets fraction 1.0 and
 * the source room's outgoing fractions are renormalized to sum to 1.
 */
export function connect(
  state: EditorState,
  from: string,
  to: string
): EdgeDoc {
  for (const id of [from, to]) {
    if (!state.graph.rooms.some((r) => r.id === id)) {
      throw new Error(`unknown room: ${id}`);
    }
  }
  if (state.graph.edges.some((e) => e.from === from && e.to === to)) {
    throw new Error(`edge already exists: ${from} → ${to}`);
  }
  if (wouldCreateCycle(state.graph, from, to)) {
    throw new Error(
      `connection refused: ${from} → ${to} would create a cycle ` +
        `(escape routes must not loop back)`
    );
  }
  const edge: EdgeDoc = { from, to, fraction: 1.0 };
  state.graph.edges.push(edge);
  renormalizeFractions(state.graph, from);
  state.selection = { kind: "edge", from, to };
  touch(state);
  return edge;
}

function renormalizeFractions(graph: GraphDoc, from: string): void {
  const outgoing = graph.edges.filter((e) => e.from === from);
  const total = outgoing.reduce((s, e) => s + e.fraction, 0);
  if (total <= 0) return;
  for (const e of outgoing) {
    e.fraction = e.fraction / total;
  }
}

export function removeRoom(state: EditorState, id: string): void {
  const before = state.graph.rooms.length;
  state.graph.rooms = state.graph.rooms.filter((r) => r.id !== id);
  if (state.graph.rooms.length === before) {
    throw new Error(`unknown room: ${id}`);
  }
  // A room goes away together with its connections.
  const orphanedSources = new Set(
    state.graph.edges.filter((e) => e.to === id).map((e) => e.from)
  );
  state.graph.edges = state.graph.edges.filter(
    (e) => e.from !== id && e.to !== id
  );
  for (const src of orphanedSources) renormalizeFractions(state.graph, src);
  if (state.selection?.kind === "room" && state.selection.id === id) {
    state.selection = null;
  }
  touch(state);
}

export function removeEdge(
  state: EditorState,
  from: string,
  to: string
): void {
  const before = state.graph.edges.length;
  state.graph.edges = state.graph.edges.filter(
    (e) => !(e.from === from && e.to === to)
  );
  if (state.graph.edges.length === before) {
    throw new Error(`unknown edge: ${from} → ${to}`);
  }
  renormalizeFractions(state.graph, from);
  touch(state);
}

export type RoomParam =
  | "width"
  | "length"
  | "exit_size"
  | "initial_population";

/** Set a room parameter from panel input; rejects non-numeric values. */
export function setRoomParam(
  state: EditorState,
  id: string,
  param: RoomParam,
  rawValue: string | number
): number {
  const room = state.graph.rooms.find((r) => r.id === id);
  if (!room) throw new Error(`unknown room: ${id}`);
  const value =
    typeof rawValue === "number" ? rawValue : Number(rawValue.trim());
  if (rawValue === "" || Number.isNaN(value) || !Number.isFinite(value)) {
    throw new Error(`${param}: not a number`);
  }
  if (param !== "initial_population" && value <= 0) {
    throw new Error(`${param}: must be positive`);
  }
  if (param === "initial_population" && (value < 0 || !Number.isInteger(value))) {
    throw new Error(`${param}: must be a non-negative integer`);
  }
  room[param] = value;
  touch(state);
  return value;
}

export function setEdgeFraction(
  state: EditorState,
  from: string,
  to: string,
  rawValue: string | number
): number {
  const edge = state.graph.edges.find(
    (e) => e.from === from && e.to === to
  );
  if (!edge) throw new Error(`unknown edge: ${from} → ${to}`);
  const value =
    typeof rawValue === "number" ? rawValue : Number(rawValue.trim());
  if (Number.isNaN(value) || value <= 0 || value > 1) {
    throw new Error("fraction: must be a number in (0, 1]");
  }
  edge.fraction = value;
  touch(state);
  return value;
}

/** Non-1 outgoing fraction sums, reported so the UI can warn inline. */
export function fractionSumIssues(
  graph: GraphDoc
): Array<{ room: string; sum: number }> {
  const sums = new Map<string, number>();
  for (const e of graph.edges) {
    sums.set(e.from, (sums.get(e.from) ?? 0) + e.fraction);
  }
  const issues: Array<{ room: string; sum: number }> = [];
  for (const [room, sum] of sums) {
    if (Math.abs(sum - 1.0) > 1e-9) issues.push({ room, sum });
  }
  return issues;
}
