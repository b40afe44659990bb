/** DOM wiring for the editor page. All logic lives in the other modules. */

import { ApiClient, ServiceError } from "./api.js";
import { parseGraph } from "./document.js";
import { DEBOUNCE_MS, LiveEstimator } from "./live.js";
import { rangeWarnings } from "./ranges.js";
import { ROOM_W, ROOM_H, render, roomAt, timelineRows } from "./render.js";
import {
  EditorState,
  RoomParam,
  connect,
  addRoom,
  fractionSumIssues,
  initialState,
  moveRoom,
  removeRoom,
  setEdgeFraction,
  setRoomParam,
} from "./state.js";

type Tool = "select" | "add" | "connect" | "remove";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

export function bootstrap(): void {
  const canvas = el<HTMLCanvasElement>("canvas");
  const ctx = canvas.getContext("2d")!;
  const status = el<HTMLDivElement>("status");
  const panel = el<HTMLDivElement>("panel");
  const estimateBox = el<HTMLDivElement>("estimate");
  const serviceUrl =
    (window as any).EVACEST_SERVICE_URL ?? "http://127.0.0.1:8020";
  const api = new ApiClient(serviceUrl);
  const state: EditorState = initialState();
  let tool: Tool = "select";
  let connectSource: string | null = null;
  let dragging: { id: string; dx: number; dy: number } | null = null;

  const live = new LiveEstimator(api, {
    onEstimate(est) {
      state.lastEstimate = est;
      state.estimateStale = false;
      renderEstimate();
      draw();
    },
    onError(message) {
      showStatus(`estimate failed: ${message}`, true);
      renderEstimate();
    },
  });

  function showStatus(message: string, isError = false): void {
    status.textContent = message;
    status.className = isError ? "status error" : "status";
  }

  function graphEdited(): void {
    draw();
    renderPanel();
    renderEstimate();
    live.graphChanged(state.graph);
  }

  function draw(): void {
    render(ctx, state, canvas.width, canvas.height);
  }

  function renderEstimate(): void {
    const est = state.lastEstimate;
    if (!est) {
      estimateBox.innerHTML = "<em>no estimate yet</em>";
      return;
    }
    const stale = state.estimateStale
      ? ' <span class="stale">(stale — updating…)</span>'
      : "";
    const rows = timelineRows(est);
    const maxEnd = Math.max(1, ...rows.map((r) => r.end));
    const bars = rows
      .map((r) => {
        const left = (r.start / maxEnd) * 100;
        const width = Math.max(0.5, ((r.end - r.start) / maxEnd) * 100);
        return (
          `<div class="trow"><span class="tlabel">${r.room}</span>` +
          `<span class="ttrack"><span class="tbar" style="left:${left}%;width:${width}%"></span></span>` +
          `<span class="tnum">${r.start.toFixed(1)}–${r.end.toFixed(1)} s</span></div>`
        );
      })
      .join("");
    const warnings = est.warnings.length
      ? `<div class="warnings">${est.warnings.map((w) => `⚠ ${w}`).join("<br>")}</div>`
      : "";
    estimateBox.innerHTML =
      `<div class="tt">total evacuation <b>${est.tt_e.toFixed(1)} s</b>` +
      ` · avg exit ${est.avg_exit_time_e.toFixed(1)} s${stale}</div>` +
      bars +
      warnings;
  }

  function renderPanel(): void {
    const sel = state.selection;
    if (sel?.kind === "room") {
      const room = state.graph.rooms.find((r) => r.id === sel.id);
      if (!room) {
        panel.innerHTML = "";
        return;
      }
      const warned = new Set(rangeWarnings(room).map((w) => w.field));
      const field = (name: RoomParam, label: string) => {
        const badge = warned.has(name)
          ? ' <span class="badge" title="outside training range; estimate will clamp">⚠</span>'
          : "";
        return (
          `<label>${label}${badge}<input data-param="${name}" ` +
          `value="${room[name]}"></label>`
        );
      };
      panel.innerHTML =
        `<h3>${room.id}</h3>` +
        field("width", "width (m)") +
        field("length", "length (m)") +
        field("exit_size", "exit size (m)") +
        field("initial_population", "initial population") +
        `<div class="field-error" id="field-error"></div>`;
      panel.querySelectorAll("input").forEach((input) => {
        input.addEventListener("change", () => {
          const param = input.dataset.param as RoomParam;
          try {
            setRoomParam(state, room.id, param, input.value);
            el<HTMLDivElement>("field-error").textContent = "";
            graphEdited();
          } catch (err: any) {
            el<HTMLDivElement>("field-error").textContent = err.message;
            input.value = String(room[param]);
          }
        });
      });
    } else if (sel?.kind === "edge") {
      const edge = state.graph.edges.find(
        (e) => e.from === sel.from && e.to === sel.to
      );
      if (!edge) {
        panel.innerHTML = "";
        return;
      }
      panel.innerHTML =
        `<h3>${edge.from} → ${edge.to}</h3>` +
        `<label>fraction<input id="fraction" value="${edge.fraction}"></label>` +
        `<div class="field-error" id="field-error"></div>`;
      el<HTMLInputElement>("fraction").addEventListener("change", (ev) => {
        const input = ev.target as HTMLInputElement;
        try {
          setEdgeFraction(state, edge.from, edge.to, input.value);
          el<HTMLDivElement>("field-error").textContent = "";
          graphEdited();
        } catch (err: any) {
          el<HTMLDivElement>("field-error").textContent = err.message;
          input.value = String(edge.fraction);
        }
      });
    } else {
      panel.innerHTML = "<em>select a room or edge</em>";
    }
    const issues = fractionSumIssues(state.graph);
    if (issues.length) {
      panel.innerHTML += `<div class="warnings">${issues
        .map((i) => `⚠ ${i.room}: outgoing fractions sum to ${i.sum.toFixed(3)}`)
        .join("<br>")}</div>`;
    }
  }

  for (const t of ["select", "add", "connect", "remove"] as Tool[]) {
    el<HTMLButtonElement>(`tool-${t}`).addEventListener("click", () => {
      tool = t;
      connectSource = null;
      document
        .querySelectorAll(".toolbar button")
        .forEach((b) => b.classList.remove("active"));
      el(`tool-${t}`).classList.add("active");
      showStatus(`tool: ${t}`);
    });
  }

  canvas.addEventListener("mousedown", (ev) => {
    const rect = canvas.getBoundingClientRect();
    const x = ev.clientX - rect.left;
    const y = ev.clientY - rect.top;
    const hit = roomAt(state.graph, x, y);
    try {
      if (tool === "add") {
        addRoom(state, x - ROOM_W / 2, y - ROOM_H / 2);
        graphEdited();
      } else if (tool === "remove" && hit) {
        removeRoom(state, hit.id);
        graphEdited();
      } else if (tool === "connect" && hit) {
        if (connectSource === null) {
          connectSource = hit.id;
          showStatus(`connect: ${hit.id} → … (click a target room)`);
        } else {
          connect(state, connectSource, hit.id);
          connectSource = null;
          graphEdited();
        }
      } else if (tool === "select") {
        if (hit) {
          state.selection = { kind: "room", id: hit.id };
          dragging = { id: hit.id, dx: x - hit.pos.x, dy: y - hit.pos.y };
        } else {
          state.selection = null;
        }
        draw();
        renderPanel();
      }
    } catch (err: any) {
      connectSource = null;
      showStatus(err.message, true);
    }
  });

  canvas.addEventListener("mousemove", (ev) => {
    if (!dragging) return;
    const rect = canvas.getBoundingClientRect();
    moveRoom(
      state,
      dragging.id,
      ev.clientX - rect.left - dragging.dx,
      ev.clientY - rect.top - dragging.dy
    );
    draw();
  });
  window.addEventListener("mouseup", () => {
    dragging = null;
  });

  el<HTMLButtonElement>("save").addEventListener("click", async () => {
    const name = el<HTMLInputElement>("graph-name").value.trim();
    if (!name) {
      showStatus("enter a graph name to save", true);
      return;
    }
    try {
      await api.saveGraph(name, state.graph);
      state.dirty = false;
      showStatus(`saved ${name}`);
    } catch (err: any) {
      showStatus(err.message, true);
    }
  });

  el<HTMLButtonElement>("load").addEventListener("click", async () => {
    const name = el<HTMLInputElement>("graph-name").value.trim();
    if (!name) {
      showStatus("enter a graph name to load", true);
      return;
    }
    try {
      const { doc } = await api.loadGraph(name);
      state.graph = doc;
      state.selection = null;
      state.dirty = false;
      showStatus(`loaded ${name}`);
      graphEdited();
    } catch (err: any) {
      showStatus(err.message, true);
    }
  });

  el<HTMLButtonElement>("simulate").addEventListener("click", async () => {
    try {
      showStatus("simulation running…");
      const jobId = await api.startSimulation(state.graph);
      const poll = async (): Promise<void> => {
        const job = await api.jobStatus(jobId);
        if (job.status === "done") {
          const simTt = Number(job.result.tt);
          const est = state.lastEstimate;
          if (est && !state.estimateStale) {
            const err = ((est.tt_e - simTt) / simTt) * 100;
            showStatus(
              `simulated tt ${simTt.toFixed(1)} s · estimate ` +
                `${est.tt_e.toFixed(1)} s · relative error ${err.toFixed(1)}%`
            );
          } else {
            showStatus(`simulated tt ${simTt.toFixed(1)} s`);
          }
        } else if (job.status === "error") {
          showStatus(`simulation failed: ${job.error}`, true);
        } else {
          setTimeout(() => void poll(), 1000);
        }
      };
      setTimeout(() => void poll(), 1000);
    } catch (err: any) {
      if (err instanceof ServiceError) {
        showStatus(`simulate: ${err.message}`, true);
      } else {
        showStatus(String(err), true);
      }
    }
  });

  showStatus(
    `ready — service ${serviceUrl}, live estimates debounce ${DEBOUNCE_MS} ms`
  );
  draw();
  renderPanel();
  renderEstimate();
}

// Re-exported so the page module can import a single entry point.
export { parseGraph };

if (typeof document !== "undefined" && document.getElementById("canvas")) {
  bootstrap();
}
