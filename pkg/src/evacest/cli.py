"""Command-line entry point.

Exit codes: 0 success, 1 domain error (validation/simulation failure),
2 usage error.
"""

import json
import sys
import time

import click
import numpy as np

from . import dataset as ds
from .envgraph import Graph
from .estimator import estimate_environment
from .mlp import DEFAULT_NORM_BOUNDS, MLP, score_below_threshold, train
from .rooms import RoomSpec, chain_layout, run_environment
from .world import SimConfig

JSON_SCHEMA = "evacest-cli-1"


def _emit(command, result, as_json):
    if as_json:
        click.echo(json.dumps({"schema": JSON_SCHEMA, "command": command,
                               "result": result}, indent=2, sort_keys=True))
    return result


def _fail(message, code=1):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


@click.group()
def main():
    """Crowd evacuation estimation toolkit."""


@main.command("gen-dataset")
@click.option("--n", type=int, required=True, help="number of rooms")
@click.option("--seed", type=int, default=0)
@click.option("--out", type=click.Path(), required=True)
@click.option("--desk-scale", is_flag=True,
              help="cap flow duration at 20 s for quick corpora")
@click.option("--threads", type=int, default=1)
@click.option("--json", "as_json", is_flag=True)
def gen_dataset(n, seed, out, desk_scale, threads, as_json):
    """Simulate N random rooms and write the metrics CSV."""
    def progress(done, total):
        if not as_json and (done % 100 == 0 or done == total):
            click.echo(f"\r{done}/{total} rooms", nl=(done == total))
    records = ds.generate(n, seed, desk_scale=desk_scale, threads=threads,
                          progress=progress)
    ds.write_csv(records, out)
    censored = sum(r.censored for r in records)
    result = {"n": n, "censored": censored, "out": str(out)}
    if not as_json:
        click.echo(f"wrote {n} rooms ({censored} censored) to {out}")
    _emit("gen-dataset", result, as_json)


@main.command("train")
@click.option("--dataset", "dataset_path", type=click.Path(exists=True),
              required=True)
@click.option("--out", type=click.Path(), required=True)
@click.option("--hidden", type=int, default=400)
@click.option("--lr", type=float, default=1e-6)
@click.option("--epochs", type=int, default=200)
@click.option("--seed", type=int, default=0)
@click.option("--val-fraction", type=float, default=0.1)
@click.option("--patience", type=int, default=10)
@click.option("--max-halvings", type=int, default=4)
@click.option("--normalize/--no-normalize", default=True)
@click.option("--target", type=click.Choice(["tt", "avg_exit_time"]),
              default="tt")
@click.option("--json", "as_json", is_flag=True)
def train_cmd(dataset_path, out, hidden, lr, epochs, seed, val_fraction,
              patience, max_halvings, normalize, target, as_json):
    """Train the evacuation-time surrogate on a dataset CSV."""
    records = ds.read_csv(dataset_path)
    X, y = ds.training_arrays(records)
    if target == "avg_exit_time":
        y = np.array([r.avg_exit_time for r in records if not r.censored])
    if len(X) == 0:
        _fail("dataset has no usable (non-censored) rooms")
    bounds = DEFAULT_NORM_BOUNDS if normalize else None
    model = MLP([6, hidden, 1], seed=seed, norm_bounds=bounds)
    def log(epoch, cur_lr, tl, vl):
        if not as_json and epoch % 10 == 0:
            click.echo(f"epoch {epoch}: lr={cur_lr:g} train={tl:.2f} "
                       f"val={vl:.2f}")
    history = train(model, X, y, lr=lr, epochs=epochs,
                    val_fraction=val_fraction, seed=seed, patience=patience,
                    max_halvings=max_halvings, log=log)
    model.save(out)
    result = {"epochs_run": len(history), "final_train_loss": history[-1][2],
              "final_val_loss": history[-1][3], "out": str(out)}
    if not as_json:
        click.echo(f"trained {len(history)} epochs; "
                   f"val loss {history[-1][3]:.3f}; saved to {out}")
    _emit("train", result, as_json)


@main.command("score")
@click.option("--dataset", "dataset_path", type=click.Path(exists=True),
              required=True)
@click.option("--model", "model_path", type=click.Path(exists=True),
              required=True)
@click.option("--threshold", type=float, default=0.10)
@click.option("--json", "as_json", is_flag=True)
def score(dataset_path, model_path, threshold, as_json):
    """Fraction of dataset rooms predicted within a relative error bound."""
    records = ds.read_csv(dataset_path)
    X, y = ds.training_arrays(records)
    model = MLP.load(model_path)
    frac = score_below_threshold(model, X, y, threshold)
    result = {"rooms": len(y), "threshold": threshold,
              "fraction_below": frac}
    if not as_json:
        click.echo(f"{100 * frac:.1f}% of {len(y)} rooms below "
                   f"{100 * threshold:.0f}% error")
    _emit("score", result, as_json)


def _load_graph(path):
    try:
        graph = Graph.load(path)
    except (OSError, ValueError) as exc:
        _fail(str(exc))
    violations = graph.validate()
    if violations:
        for v in violations:
            click.echo(f"violation [{v.code}]: {v.message}", err=True)
        sys.exit(1)
    return graph


@main.command("estimate")
@click.option("--graph", "graph_path", type=click.Path(exists=True),
              required=True)
@click.option("--model", "model_path", type=click.Path(exists=True),
              required=True)
@click.option("--model-avg", "model_avg_path", type=click.Path(exists=True))
@click.option("--fet-variant", type=click.Choice(["simple", "diamond"]),
              default="simple")
@click.option("--json", "as_json", is_flag=True)
@click.option("--table", is_flag=True)
def estimate(graph_path, model_path, model_avg_path, fet_variant, as_json,
             table):
    """Estimate environment evacuation time from a graph document."""
    graph = _load_graph(graph_path)
    model = MLP.load(model_path)
    model_avg = MLP.load(model_avg_path) if model_avg_path else None
    est = estimate_environment(graph, model, model_avg=model_avg,
                               fet_variant=fet_variant)
    if as_json:
        _emit("estimate", est.to_dict(), True)
        return
    if table:
        click.echo(f"{'room':<14} {'git':>8} {'f':>8} {'F':>8} {'pop':>8} "
                   f"{'tt':>8}")
        for rid, r in est.per_room.items():
            click.echo(f"{rid:<14} {r.git:8.2f} {r.f:8.2f} {r.F:8.2f} "
                       f"{r.pop:8.1f} {r.tt:8.2f}")
    for w in est.warnings:
        click.echo(f"warning: {w}", err=True)
    click.echo(f"tt_e = {est.tt_e:.2f} s")


def _chain_specs_from_graph(graph):
    order = graph.topological_order()
    rooms = graph.room_map()
    if any(len(graph.out_edges(r.id)) > 1 or len(graph.in_edges(r.id)) > 1
           for r in graph.rooms):
        _fail("simulate supports straight chain graphs only")
    return order, [RoomSpec(rooms[r].width, rooms[r].length,
                            rooms[r].exit_size,
                            initial_population=rooms[r].initial_population)
                   for r in order]


@main.command("simulate")
@click.option("--graph", "graph_path", type=click.Path(exists=True),
              required=True)
@click.option("--seed", type=int, default=0)
@click.option("--json", "as_json", is_flag=True)
def simulate(graph_path, seed, as_json):
    """Full agent simulation of a chain-graph environment."""
    graph = _load_graph(graph_path)
    ids, specs = _chain_specs_from_graph(graph)
    layout = chain_layout(specs, ids=ids,
                          populations=[s.initial_population for s in specs])
    metrics = run_environment(layout, SimConfig(rng_seed=seed))
    result = {"tt": metrics.tt, "avg_exit_time": metrics.avg_exit_time,
              "censored": metrics.censored}
    if not as_json:
        click.echo(f"simulated tt = {metrics.tt:.2f} s"
                   + (" (censored)" if metrics.censored else ""))
    _emit("simulate", result, as_json)


SCENARIOS = ("walk", "corner", "counterflow", "exitalloc", "showcase")


@main.command("validate")
@click.option("--only", type=click.Choice(SCENARIOS), multiple=True)
@click.option("--seed", type=int, default=0)
@click.option("--json", "as_json", is_flag=True)
def validate(only, seed, as_json):
    """Run the component scenario tests."""
    from . import harness
    cfg = SimConfig(rng_seed=seed)
    runners = {
        "walk": lambda: harness.imo_walk_test(cfg),
        "corner": lambda: harness.imo_corner_test(cfg),
        "counterflow": lambda: harness.imo_counterflow_test(cfg),
        "exitalloc": lambda: harness.imo_exit_alloc_test(),
        "showcase": lambda: harness.orca_showcase(cfg, duration=60.0),
    }
    picked = only or SCENARIOS
    results = {}
    for name in picked:
        r = runners[name]()
        r.pop("frames", None)
        results[name] = r
        if not as_json:
            click.echo(f"{name:<12} {'PASS' if r['passed'] else 'FAIL'}")
    _emit("validate", results, as_json)
    if not all(r["passed"] for r in results.values()):
        sys.exit(1)


@main.group()
def experiment():
    """Estimation-vs-simulation experiments."""


@experiment.command("compare")
@click.option("--suite", "suite_path", type=click.Path(exists=True))
@click.option("--model", "model_path", type=click.Path(exists=True),
              required=True)
@click.option("--seed", type=int, default=0)
@click.option("--json", "as_json", is_flag=True)
def experiment_compare(suite_path, model_path, seed, as_json):
    """Compare estimates against simulations over a fixture suite."""
    from .harness import compare_environments, load_suite
    model = MLP.load(model_path)
    cases = load_suite(suite_path)
    report = compare_environments(cases, model, SimConfig(rng_seed=seed))
    if not as_json:
        click.echo(report.render_table())
    _emit("experiment compare", report.to_dict(), as_json)


@experiment.command("chain")
@click.option("--room", "room_str", default="28,6,5.6,99",
              help="width,length,exit_size,initial_population")
@click.option("--max", "max_n", type=int, default=29)
@click.option("--model", "model_path", type=click.Path(exists=True),
              required=True)
@click.option("--seed", type=int, default=0)
@click.option("--json", "as_json", is_flag=True)
def experiment_chain(room_str, max_n, model_path, seed, as_json):
    """Error trend over replicated room chains of growing length."""
    from .harness.compare import chain_error_trend
    try:
        w, l, es, ip = (float(x) for x in room_str.split(","))
    except ValueError:
        _fail("--room expects width,length,exit_size,initial_population", 2)
    room = RoomSpec(w, l, es, initial_population=int(ip))
    model = MLP.load(model_path)
    trend = chain_error_trend(room, model, ns=range(3, max_n + 1, 2),
                              cfg=SimConfig(rng_seed=seed))
    if not as_json:
        for row in trend["rows"]:
            err = "censored" if row["censored"] else f"{100*row['err']:6.1f}%"
            click.echo(f"n={row['n']:>2} sim={row['simulated_tt']:8.2f} "
                       f"est={row['estimated_tt']:8.2f} err={err}")
        click.echo(f"spearman(|err|, n) = {trend['spearman_abs_err_vs_n']:.3f}")
    _emit("experiment chain", trend, as_json)


@main.command("serve")
@click.option("--port", type=int, default=8020)
@click.option("--model", "model_path", type=click.Path(exists=True),
              envvar="EVACEST_MODEL")
@click.option("--graphs-dir", type=click.Path(), default="graphs")
@click.option("--host", default="127.0.0.1")
def serve(port, model_path, graphs_dir, host):
    """Run the HTTP service."""
    from .service import serve as run_service
    run_service(port=port, model_path=model_path, graphs_dir=graphs_dir,
                host=host)


@main.command("demo")
@click.option("--seed", type=int, default=0)
@click.option("--rooms", type=int, default=150,
              help="corpus size for the quick demo")
@click.option("--threads", type=int, default=1)
def demo(seed, rooms, threads):
    """One-command quickstart: tiny corpus, training, comparison suite.

    Output is byte-identical across runs with the same seed.
    """
    from .harness import compare_environments, load_suite
    records = ds.generate(rooms, seed, desk_scale=True, threads=threads)
    X, y = ds.training_arrays(records)
    model = MLP([6, 64, 1], seed=seed, norm_bounds=DEFAULT_NORM_BOUNDS)
    train(model, X, y, lr=0.003, epochs=150, seed=seed)
    frac = score_below_threshold(model, X, y)
    click.echo(f"corpus: {rooms} rooms ({sum(r.censored for r in records)} "
               "censored)")
    click.echo(f"training fit: {100 * frac:.1f}% of rooms below 10% error")
    report = compare_environments(load_suite(), model,
                                  SimConfig(rng_seed=seed))
    click.echo(report.render_table())


if __name__ == "__main__":
    main()
