"""Estimation-vs-simulation experiments over room-chain environments.

Each case exists in two forms built from the same room specs: a
connectivity graph fed to the estimator and a walkable geometry fed to the
simulator. The relative error Err = (estimated − simulated) / simulated is
collected per case and aggregated.
"""

import json
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from ..envgraph import Edge, Graph, Room
from ..estimator import estimate_environment
from ..rooms import RoomSpec, chain_layout, run_environment
from ..world import SimConfig

# published timings (seconds) for a real night-club drill, kept as reference
# constants in report footers: observed drill, questionnaire-based estimate,
# full simulation, and graph-heuristic estimation
NIGHTCLUB_REFERENCE = {
    "drill": 175.0,
    "questionnaire": 142.0,
    "simulated": 183.0,
    "estimated": 176.0,
    "relative_errors_pct": [-18.85, 4.57, 0.57],
}


@dataclass
class CaseResult:
    name: str
    simulated_tt: float
    estimated_tt: float
    censored: bool

    @property
    def err(self):
        return (self.estimated_tt - self.simulated_tt) / self.simulated_tt

    def to_dict(self):
        return {"name": self.name, "simulated_tt": self.simulated_tt,
                "estimated_tt": self.estimated_tt, "censored": self.censored,
                "err": None if self.censored else self.err}


@dataclass
class ComparisonReport:
    cases: list = field(default_factory=list)

    def usable(self):
        return [c for c in self.cases if not c.censored]

    @property
    def mean_abs_err(self):
        errs = [abs(c.err) for c in self.usable()]
        return float(np.mean(errs)) if errs else float("nan")

    @property
    def std_abs_err(self):
        errs = [abs(c.err) for c in self.usable()]
        return float(np.std(errs)) if errs else float("nan")

    def to_dict(self):
        return {"cases": [c.to_dict() for c in self.cases],
                "mean_abs_err": self.mean_abs_err,
                "std_abs_err": self.std_abs_err,
                "reference": NIGHTCLUB_REFERENCE}

    def render_table(self):
        lines = [f"{'case':<24} {'sim tt':>10} {'est tt':>10} {'err %':>8}"]
        for c in self.cases:
            err = "censored" if c.censored else f"{100 * c.err:8.1f}"
            lines.append(f"{c.name:<24} {c.simulated_tt:10.2f} "
                         f"{c.estimated_tt:10.2f} {err:>8}")
        lines.append(f"mean |err| = {100 * self.mean_abs_err:.1f}%  "
                     f"std = {100 * self.std_abs_err:.1f}%")
        ref = NIGHTCLUB_REFERENCE
        lines.append("reference drill timings (s): "
                     f"observed {ref['drill']:.0f}, "
                     f"questionnaire {ref['questionnaire']:.0f}, "
                     f"simulated {ref['simulated']:.0f}, "
                     f"estimated {ref['estimated']:.0f}")
        return "\n".join(lines)


def graph_from_chain(specs, populations=None):
    """Connectivity graph for a straight chain of rooms (last one exits)."""
    pops = populations
    if pops is None:
        pops = [s.initial_population for s in specs]
    rooms = [Room(f"r{i}", s.width, s.length, s.exit_size, int(pops[i]),
                  pos=(0.0, float(i)))
             for i, s in enumerate(specs)]
    edges = [Edge(f"r{i}", f"r{i + 1}", 1.0) for i in range(len(specs) - 1)]
    return Graph(rooms, edges)


def _case_specs(case):
    return [RoomSpec(r["width"], r["length"], r["exit_size"],
                     initial_population=int(r.get("initial_population", 0)))
            for r in case["rooms"]]


def load_suite(path=None):
    if path is None:
        ref = resources.files("evacest.harness") \
            .joinpath("fixtures/compare_suite.json")
        doc = json.loads(ref.read_text())
    else:
        with open(path) as fh:
            doc = json.load(fh)
    return doc["cases"]


def run_case(name, specs, model, cfg):
    """Simulate and estimate one chain case."""
    pops = [s.initial_population for s in specs]
    layout = chain_layout(specs, populations=pops)
    metrics = run_environment(layout, cfg)
    est = estimate_environment(graph_from_chain(specs, pops), model)
    return CaseResult(name, metrics.tt, est.tt_e, metrics.censored)


def compare_environments(cases, model, cfg=None, progress=None):
    """Run the whole suite: each case simulated and estimated."""
    cfg = cfg or SimConfig()
    report = ComparisonReport()
    for i, case in enumerate(cases):
        specs = _case_specs(case)
        report.cases.append(run_case(case["name"], specs, model, cfg))
        if progress:
            progress(i + 1, len(cases))
    return report


def replicate_chain(room, n_rooms):
    """Chain of n_rooms copies of `room`, all population in the first room.

    Returns (graph, geometry) so callers can both estimate and simulate.
    """
    if n_rooms < 3 or n_rooms % 2 == 0:
        raise ValueError("n_rooms must be odd and >= 3")
    specs = [RoomSpec(room.width, room.length, room.exit_size,
                      initial_population=room.initial_population if i == 0
                      else 0)
             for i in range(n_rooms)]
    pops = [s.initial_population for s in specs]
    return graph_from_chain(specs, pops), chain_layout(specs, populations=pops)


def chain_error_trend(room, model, ns=range(3, 30, 2), cfg=None,
                      progress=None):
    """|Err| per chain length plus the Spearman rank correlation of
    |Err| against n."""
    from scipy.stats import spearmanr
    cfg = cfg or SimConfig()
    rows = []
    ns = list(ns)
    for i, n in enumerate(ns):
        graph, layout = replicate_chain(room, n)
        metrics = run_environment(layout, cfg)
        est = estimate_environment(graph, model)
        err = (None if metrics.censored
               else (est.tt_e - metrics.tt) / metrics.tt)
        rows.append({"n": n, "simulated_tt": metrics.tt,
                     "estimated_tt": est.tt_e, "censored": metrics.censored,
                     "err": err})
        if progress:
            progress(i + 1, len(ns))
    usable = [r for r in rows if not r["censored"]]
    rho = float(spearmanr([r["n"] for r in usable],
                          [abs(r["err"]) for r in usable]).statistic)
    return {"rows": rows, "spearman_abs_err_vs_n": rho}
