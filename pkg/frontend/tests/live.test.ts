import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient, FetchLike, ServiceError } from "../src/api.js";
import { emptyGraph, serializeGraph } from "../src/document.js";
import { DEBOUNCE_MS, LiveEstimator } from "../src/live.js";
import { EstimateDoc, addRoom, initialState } from "../src/state.js";

function fakeEstimate(tt: number): EstimateDoc {
  return { tt_e: tt, avg_exit_time_e: tt / 2, per_room: [], warnings: [] };
}

function jsonResponse(status: number, body: unknown) {
  return {
    ok: status < 400,
    status,
    text: async () => JSON.stringify(body),
    json: async () => body,
  };
}

describe("ApiClient", () => {
  it("POSTs the canonical document to /estimate", async () => {
    const calls: Array<{ url: string; body?: string }> = [];
    const fetchImpl: FetchLike = async (url, init) => {
      calls.push({ url, body: init?.body });
      return jsonResponse(200, fakeEstimate(12));
    };
    const api = new ApiClient("http://svc", fetchImpl);
    const doc = emptyGraph();
    const est = await api.estimate(doc);
    expect(est.tt_e).toBe(12);
    expect(calls[0].url).toBe("http://svc/estimate");
    expect(calls[0].body).toBe(serializeGraph(doc));
  });

  it("surfaces violations from a 400 response", async () => {
    const fetchImpl: FetchLike = async () =>
      jsonResponse(400, {
        detail: "invalid graph",
        violations: [{ code: "cycle", message: "graph has a cycle" }],
      });
    const api = new ApiClient("http://svc", fetchImpl);
    await expect(api.estimate(emptyGraph())).rejects.toMatchObject({
      status: 400,
      violations: [{ code: "cycle", message: "graph has a cycle" }],
    });
  });

  it("save/load round trip preserves bytes exactly", async () => {
    const store = new Map<string, string>();
    const fetchImpl: FetchLike = async (url, init) => {
      const name = url.split("/graphs/")[1];
      if (init?.method === "PUT") {
        store.set(name, init.body!);
        return jsonResponse(200, { stored: name });
      }
      if (!store.has(name)) return jsonResponse(404, { detail: "missing" });
      const raw = store.get(name)!;
      return {
        ok: true,
        status: 200,
        text: async () => raw,
        json: async () => JSON.parse(raw),
      };
    };
    const api = new ApiClient("http://svc", fetchImpl);
    const state = initialState();
    addRoom(state, 10, 20, "hall");
    addRoom(state, 200, 20, "foyer");
    addRoom(state, 400, 20, "street");
    const saved = await api.saveGraph("plan", state.graph);
    const { doc, raw } = await api.loadGraph("plan");
    expect(raw).toBe(saved);
    expect(serializeGraph(doc)).toBe(saved);
  });

  it("loadGraph raises ServiceError on 404", async () => {
    const fetchImpl: FetchLike = async () => jsonResponse(404, {});
    const api = new ApiClient("http://svc", fetchImpl);
    await expect(api.loadGraph("nope")).rejects.toBeInstanceOf(ServiceError);
  });
});

describe("LiveEstimator", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("debounces rapid edits into a single request", async () => {
    let requests = 0;
    const fetchImpl: FetchLike = async () => {
      requests += 1;
      return jsonResponse(200, fakeEstimate(requests));
    };
    const results: EstimateDoc[] = [];
    const live = new LiveEstimator(new ApiClient("http://svc", fetchImpl), {
      onEstimate: (e) => results.push(e),
      onError: () => {},
    });
    const doc = emptyGraph();
    live.graphChanged(doc);
    vi.advanceTimersByTime(DEBOUNCE_MS - 10);
    live.graphChanged(doc);
    live.graphChanged(doc);
    vi.advanceTimersByTime(DEBOUNCE_MS);
    await vi.runAllTimersAsync();
    expect(requests).toBe(1);
    expect(results).toHaveLength(1);
  });

  it("an edit after the debounce fires a second request", async () => {
    let requests = 0;
    const fetchImpl: FetchLike = async () => {
      requests += 1;
      return jsonResponse(200, fakeEstimate(requests));
    };
    const results: EstimateDoc[] = [];
    const live = new LiveEstimator(new ApiClient("http://svc", fetchImpl), {
      onEstimate: (e) => results.push(e),
      onError: () => {},
    });
    live.graphChanged(emptyGraph());
    await vi.advanceTimersByTimeAsync(DEBOUNCE_MS + 1);
    live.graphChanged(emptyGraph());
    await vi.advanceTimersByTimeAsync(DEBOUNCE_MS + 1);
    expect(requests).toBe(2);
    expect(results.map((r) => r.tt_e)).toEqual([1, 2]);
  });

  it("a newer request supersedes a slower in-flight one", async () => {
    let call = 0;
    const resolvers: Array<(v: any) => void> = [];
    const fetchImpl: FetchLike = async () => {
      call += 1;
      const mine = call;
      return new Promise((resolve) => {
        resolvers.push(() =>
          resolve(jsonResponse(200, fakeEstimate(mine)))
        );
      });
    };
    const results: EstimateDoc[] = [];
    const live = new LiveEstimator(new ApiClient("http://svc", fetchImpl), {
      onEstimate: (e) => results.push(e),
      onError: () => {},
    });
    live.graphChanged(emptyGraph());
    await vi.advanceTimersByTimeAsync(DEBOUNCE_MS + 1);
    live.graphChanged(emptyGraph());
    await vi.advanceTimersByTimeAsync(DEBOUNCE_MS + 1);
    expect(resolvers).toHaveLength(2);
    // Resolve the stale first request after the second: its result must
    // not overwrite the newer one (last write wins on display).
    resolvers[1](null);
    await vi.runAllTimersAsync();
    resolvers[0](null);
    await vi.runAllTimersAsync();
    expect(results.map((r) => r.tt_e)).toEqual([2]);
  });

  it("reports service errors through onError", async () => {
    const fetchImpl: FetchLike = async () =>
      jsonResponse(400, { detail: "invalid graph: cycle" });
    const errors: string[] = [];
    const live = new LiveEstimator(new ApiClient("http://svc", fetchImpl), {
      onEstimate: () => {},
      onError: (m) => errors.push(m),
    });
    live.graphChanged(emptyGraph());
    await vi.advanceTimersByTimeAsync(DEBOUNCE_MS + 1);
    expect(errors).toEqual(["invalid graph: cycle"]);
  });
});
