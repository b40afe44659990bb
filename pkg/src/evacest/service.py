"""HTTP API for the editor UI and scripts: estimation, room-chain
simulation jobs, and flat-file graph persistence."""

import json
import os
import re
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware

from .envgraph import Graph
from .estimator import estimate_environment
from .mlp import MLP
from .rooms import RoomSpec, chain_layout, run_environment
from .world import SimConfig

GRAPH_NAME_RE = re.compile(r"^[A-Za-z0-9_-]+$")


def _violations_payload(violations):
    return [{"code": v.code, "message": v.message, "room": v.room,
             "edge": list(v.edge) if v.edge else None} for v in violations]


def create_app(model=None, graphs_dir=None, sim_cfg=None, max_workers=2):
    app = FastAPI(title="evacest service")
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])
    state = {
        "model": model,
        "graphs_dir": graphs_dir,
        "cfg": sim_cfg or SimConfig(),
        "jobs": {},
        "pool": ThreadPoolExecutor(max_workers=max_workers),
        "lock": threading.Lock(),
    }
    app.state.evacest = state

    def _json(payload, status=200):
        return Response(json.dumps(payload), status_code=status,
                        media_type="application/json")

    def _parse_graph(doc):
        try:
            graph = Graph.from_dict(doc)
        except ValueError as exc:
            return None, _json({"error": str(exc)}, 400)
        violations = graph.validate()
        if violations:
            return None, _json({"error": "invalid graph",
                                "violations": _violations_payload(violations)},
                               400)
        return graph, None

    @app.post("/estimate")
    async def estimate(request: Request):
        if state["model"] is None:
            return _json({"error": "no model loaded"}, 422)
        doc = await request.json()
        graph, err = _parse_graph(doc)
        if err:
            return err
        est = estimate_environment(graph, state["model"])
        return _json(est.to_dict())

    def _run_simulation_job(job, graph):
        try:
            order = graph.topological_order()
            rooms = graph.room_map()
            specs = [RoomSpec(rooms[r].width, rooms[r].length,
                              rooms[r].exit_size,
                              initial_population=rooms[r].initial_population)
                     for r in order]
            pops = [s.initial_population for s in specs]
            layout = chain_layout(specs, ids=order, populations=pops)
            metrics = run_environment(layout, state["cfg"])
            exits = {}
            for rid, t in metrics.room_exit_events:
                exits.setdefault(rid, []).append(round(t, 4))
            job["result"] = {"tt": metrics.tt,
                             "avg_exit_time": metrics.avg_exit_time,
                             "censored": metrics.censored,
                             "room_exit_times": exits}
            job["status"] = "done"
        except Exception as exc:  # surfaced to the client as a failed job
            job["status"] = "failed"
            job["error"] = str(exc)

    @app.post("/simulate")
    async def simulate(request: Request):
        doc = await request.json()
        body_graph = doc.get("graph", doc)
        graph, err = _parse_graph(body_graph)
        if err:
            return err
        # the simulable geometry builder only supports straight chains
        if any(len(graph.out_edges(r.id)) > 1 or len(graph.in_edges(r.id)) > 1
               for r in graph.rooms):
            return _json({"error": "simulation supports chain graphs only"},
                         400)
        job_id = uuid.uuid4().hex
        job = {"id": job_id, "status": "queued", "result": None}
        with state["lock"]:
            state["jobs"][job_id] = job
        job["status"] = "running"
        state["pool"].submit(_run_simulation_job, job, graph)
        return _json({"id": job_id, "status": job["status"]})

    @app.get("/jobs/{job_id}")
    async def job_status(job_id: str):
        job = state["jobs"].get(job_id)
        if job is None:
            return _json({"error": "unknown job"}, 404)
        payload = {"id": job["id"], "status": job["status"],
                   "result": job["result"]}
        if "error" in job:
            payload["error"] = job["error"]
        return _json(payload)

    def _graph_path(name):
        return os.path.join(state["graphs_dir"], f"{name}.json")

    @app.get("/graphs/{name}")
    async def get_graph(name: str):
        if not GRAPH_NAME_RE.match(name) or state["graphs_dir"] is None:
            return _json({"error": "bad graph name"}, 400)
        path = _graph_path(name)
        if not os.path.exists(path):
            return _json({"error": "unknown graph"}, 404)
        with open(path, "rb") as fh:
            return Response(fh.read(), media_type="application/json")

    @app.put("/graphs/{name}")
    async def put_graph(name: str, request: Request):
        if not GRAPH_NAME_RE.match(name) or state["graphs_dir"] is None:
            return _json({"error": "bad graph name"}, 400)
        raw = await request.body()
        try:
            doc = json.loads(raw)
        except json.JSONDecodeError as exc:
            return _json({"error": f"invalid JSON: {exc}"}, 400)
        _, err = _parse_graph(doc)
        if err:
            return err
        os.makedirs(state["graphs_dir"], exist_ok=True)
        # persist the submitted bytes verbatim so GET returns them unchanged
        with state["lock"]:
            with open(_graph_path(name), "wb") as fh:
                fh.write(raw)
        return _json({"name": name, "stored": True})

    return app


def serve(port=8020, model_path=None, graphs_dir=None, host="127.0.0.1"):
    import uvicorn
    model = MLP.load(model_path) if model_path else None
    app = create_app(model=model, graphs_dir=graphs_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")
