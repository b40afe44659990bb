/** Canvas rendering for the graph editor. Pure drawing — no state logic. */

import { GraphDoc, RoomDoc } from "./document.js";
import { rangeWarnings } from "./ranges.js";
import { EditorState, EstimateDoc } from "./state.js";

export const ROOM_W = 120;
export const ROOM_H = 72;

export function roomAt(
  graph: GraphDoc,
  x: number,
  y: number
): RoomDoc | null {
  // Topmost (last drawn) wins.
  for (let i = graph.rooms.length - 1; i >= 0; i -= 1) {
    const r = graph.rooms[i];
    if (
      x >= r.pos.x &&
      x <= r.pos.x + ROOM_W &&
      y >= r.pos.y &&
      y <= r.pos.y + ROOM_H
    ) {
      return r;
    }
  }
  return null;
}

function center(r: RoomDoc): { x: number; y: number } {
  return { x: r.pos.x + ROOM_W / 2, y: r.pos.y + ROOM_H / 2 };
}

export function render(
  ctx: CanvasRenderingContext2D,
  state: EditorState,
  width: number,
  height: number
): void {
  ctx.clearRect(0, 0, width, height);
  const byId = new Map(state.graph.rooms.map((r) => [r.id, r]));

  for (const e of state.graph.edges) {
    const a = byId.get(e.from);
    const b = byId.get(e.to);
    if (!a || !b) continue;
    const pa = center(a);
    const pb = center(b);
    const selected =
      state.selection?.kind === "edge" &&
      state.selection.from === e.from &&
      state.selection.to === e.to;
    ctx.strokeStyle = selected ? "#d97706" : "#64748b";
    ctx.lineWidth = selected ? 3 : 1.5;
    ctx.beginPath();
    ctx.moveTo(pa.x, pa.y);
    ctx.lineTo(pb.x, pb.y);
    ctx.stroke();
    // Arrowhead at 60% along the edge.
    const t = 0.6;
    const mx = pa.x + (pb.x - pa.x) * t;
    const my = pa.y + (pb.y - pa.y) * t;
    const ang = Math.atan2(pb.y - pa.y, pb.x - pa.x);
    ctx.fillStyle = ctx.strokeStyle;
    ctx.beginPath();
    ctx.moveTo(mx, my);
    ctx.lineTo(mx - 10 * Math.cos(ang - 0.4), my - 10 * Math.sin(ang - 0.4));
    ctx.lineTo(mx - 10 * Math.cos(ang + 0.4), my - 10 * Math.sin(ang + 0.4));
    ctx.fill();
    ctx.fillStyle = "#334155";
    ctx.font = "11px sans-serif";
    ctx.fillText(e.fraction.toFixed(2), mx + 6, my - 6);
  }

  const perRoom = new Map<string, Record<string, unknown>>();
  if (state.lastEstimate && !state.estimateStale) {
    for (const pr of state.lastEstimate.per_room) {
      perRoom.set(String(pr.room_id), pr);
    }
  }

  for (const r of state.graph.rooms) {
    const selected =
      state.selection?.kind === "room" && state.selection.id === r.id;
    const warned = rangeWarnings(r).length > 0;
    ctx.fillStyle = "#f8fafc";
    ctx.strokeStyle = selected ? "#2563eb" : warned ? "#d97706" : "#475569";
    ctx.lineWidth = selected ? 3 : 1.5;
    ctx.fillRect(r.pos.x, r.pos.y, ROOM_W, ROOM_H);
    ctx.strokeRect(r.pos.x, r.pos.y, ROOM_W, ROOM_H);
    ctx.fillStyle = "#0f172a";
    ctx.font = "bold 12px sans-serif";
    ctx.fillText(r.id, r.pos.x + 8, r.pos.y + 16);
    ctx.font = "11px sans-serif";
    ctx.fillText(
      `${r.width}×${r.length} m, exit ${r.exit_size} m`,
      r.pos.x + 8,
      r.pos.y + 32
    );
    ctx.fillText(`pop ${r.initial_population}`, r.pos.x + 8, r.pos.y + 46);
    const pr = perRoom.get(r.id);
    if (pr) {
      ctx.fillStyle = "#166534";
      ctx.fillText(
        `git ${(pr.git as number).toFixed(1)}s  tt ${(pr.tt as number).toFixed(1)}s`,
        r.pos.x + 8,
        r.pos.y + 62
      );
    }
    if (warned) {
      ctx.fillStyle = "#d97706";
      ctx.font = "bold 12px sans-serif";
      ctx.fillText("⚠", r.pos.x + ROOM_W - 18, r.pos.y + 16);
    }
  }
}

/** Rows for the per-room timeline: each room busy from git to git+tt. */
export function timelineRows(
  estimate: EstimateDoc
): Array<{ room: string; start: number; end: number }> {
  return estimate.per_room.map((pr) => {
    const git = Number(pr.git);
    return {
      room: String(pr.room_id),
      start: git,
      end: git + Number(pr.tt),
    };
  });
}
