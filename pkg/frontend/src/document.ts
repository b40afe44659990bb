/** Graph document model shared with the evacest CLI and service. */

export const GRAPH_VERSION = "evacest-graph-1";

export interface RoomDoc {
  id: string;
  width: number;
  length: number;
  exit_size: number;
  initial_population: number;
  pos: { x: number; y: number };
}

export interface EdgeDoc {
  from: string;
  to: string;
  fraction: number;
}

export interface GraphDoc {
  version: string;
  rooms: RoomDoc[];
  edges: EdgeDoc[];
}

export function emptyGraph(): GraphDoc {
  return { version: GRAPH_VERSION, rooms: [], edges: [] };
}

/**
 * Canonical serialization: fixed key order, 2-space indent, trailing
 * newline. Save/load round trips through the service must be
 * byte-identical, so every save path funnels through here.
 */
export function serializeGraph(doc: GraphDoc): string {
  const rooms = doc.rooms.map((r) => ({
    id: r.id,
    width: r.width,
    length: r.length,
    exit_size: r.exit_size,
    initial_population: r.initial_population,
    pos: { x: r.pos.x, y: r.pos.y },
  }));
  const edges = doc.edges.map((e) => ({
    from: e.from,
    to: e.to,
    fraction: e.fraction,
  }));
  return JSON.stringify({ version: doc.version, rooms, edges }, null, 2) + "\n";
}

export function parseGraph(text: string): GraphDoc {
  const raw = JSON.parse(text);
  if (raw.version !== GRAPH_VERSION) {
    throw new Error(`unsupported graph version: ${raw.version}`);
  }
  const rooms: RoomDoc[] = (raw.rooms ?? []).map((r: any) => {
    for (const key of ["id", "width", "length", "exit_size"]) {
      if (r[key] === undefined) throw new Error(`room missing ${key}`);
    }
    return {
      id: String(r.id),
      width: Number(r.width),
      length: Number(r.length),
      exit_size: Number(r.exit_size),
      initial_population: Number(r.initial_population ?? 0),
      pos: { x: Number(r.pos?.x ?? 0), y: Number(r.pos?.y ?? 0) },
    };
  });
  const edges: EdgeDoc[] = (raw.edges ?? []).map((e: any) => {
    if (e.from === undefined || e.to === undefined) {
      throw new Error("edge missing endpoint");
    }
    return {
      from: String(e.from),
      to: String(e.to),
      fraction: Number(e.fraction ?? 1.0),
    };
  });
  return { version: GRAPH_VERSION, rooms, edges };
}

/** True if adding from→to would close a directed cycle. */
export function wouldCreateCycle(
  doc: GraphDoc,
  from: string,
  to: string
): boolean {
  if (from === to) return true;
  // Cycle iff `from` is already reachable from `to`.
  const out = new Map<string, string[]>();
  for (const e of doc.edges) {
    const list = out.get(e.from) ?? [];
    list.push(e.to);
    out.set(e.from, list);
  }
  const seen = new Set<string>([to]);
  const stack = [to];
  while (stack.length) {
    const node = stack.pop()!;
    if (node === from) return true;
    for (const next of out.get(node) ?? []) {
      if (!seen.has(next)) {
        seen.add(next);
        stack.push(next);
      }
    }
  }
  return false;
}
