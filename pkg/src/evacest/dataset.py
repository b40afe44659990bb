"""Randomized single-room dataset generation.

Rooms are sampled uniformly from the supported parameter ranges, each one is
simulated, and the resulting per-room metrics are written to CSV for
surrogate training.
"""

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .rooms import RoomSpec, run_room
from .world import SimConfig

# uniform sampling ranges for room parameters
PARAM_RANGES = {
    "width": (2.0, 20.0),
    "length": (2.0, 20.0),
    "exit_size": (0.9, 5.0),
    "input_flow": (1.0, 10.0),
    "flow_duration": (0.2, 100.0),
    "initial_population": (0, 99),  # integer, inclusive
}

# flow_duration cap for quick desk-scale corpora
DESK_SCALE_MAX_FLOW_DURATION = 20.0

CSV_HEADER = ["idx", "seed", "width", "length", "exit_size", "input_flow",
              "flow_duration", "initial_population", "tt", "avg_exit_time",
              "avg_speed", "avg_density", "censored"]


@dataclass
class DatasetRecord:
    idx: int
    seed: int
    spec: RoomSpec
    tt: float
    avg_exit_time: float
    avg_speed: float
    avg_density: float
    censored: bool

    def inputs(self):
        return self.spec.as_inputs()


def sample_room(rng, desk_scale=False):
    """Draw one random room spec.

    The exit must fit in the wall it sits on, so exit_size is redrawn until
    it does not exceed the room width.
    """
    width = rng.uniform(*PARAM_RANGES["width"])
    length = rng.uniform(*PARAM_RANGES["length"])
    lo, hi = PARAM_RANGES["exit_size"]
    exit_size = rng.uniform(lo, hi)
    while exit_size > width:
        exit_size = rng.uniform(lo, hi)
    input_flow = rng.uniform(*PARAM_RANGES["input_flow"])
    fd_hi = PARAM_RANGES["flow_duration"][1]
    if desk_scale:
        fd_hi = DESK_SCALE_MAX_FLOW_DURATION
    flow_duration = rng.uniform(PARAM_RANGES["flow_duration"][0], fd_hi)
    ip_lo, ip_hi = PARAM_RANGES["initial_population"]
    initial_population = int(rng.integers(ip_lo, ip_hi + 1))
    return RoomSpec(width, length, exit_size, input_flow, flow_duration,
                    initial_population)


def _simulate_record(args):
    idx, seed, spec = args
    metrics = run_room(spec, SimConfig(rng_seed=seed))
    return DatasetRecord(idx, seed, spec, metrics.tt, metrics.avg_exit_time,
                         metrics.avg_speed, metrics.avg_density,
                         metrics.censored)


def generate(n, seed, desk_scale=False, threads=1, progress=None):
    """Generate n simulated rooms; deterministic for a given (n, seed).

    Each record gets an independent child seed so results do not depend on
    worker scheduling. Records are returned in idx order.
    """
    ss = np.random.SeedSequence(seed)
    sample_rng = np.random.default_rng(ss.spawn(1)[0])
    child_seeds = [int(s.generate_state(1)[0]) for s in ss.spawn(n + 1)[1:]]
    jobs = [(i, child_seeds[i], sample_room(sample_rng, desk_scale))
            for i in range(n)]
    if threads <= 1:
        records = []
        for job in jobs:
            records.append(_simulate_record(job))
            if progress:
                progress(len(records), n)
    else:
        records = [None] * n
        done = 0
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for rec in pool.map(_simulate_record, jobs, chunksize=8):
                records[rec.idx] = rec
                done += 1
                if progress:
                    progress(done, n)
    return records


def write_csv(records, path):
    with open(path, "w", newline="") as fh:
        _write(records, fh)


def dumps_csv(records):
    buf = io.StringIO()
    _write(records, buf)
    return buf.getvalue()


def _write(records, fh):
    w = csv.writer(fh)
    w.writerow(CSV_HEADER)
    for r in sorted(records, key=lambda r: r.idx):
        s = r.spec
        w.writerow([r.idx, r.seed,
                    repr(s.width), repr(s.length), repr(s.exit_size),
                    repr(s.input_flow), repr(s.flow_duration),
                    s.initial_population,
                    repr(r.tt), repr(r.avg_exit_time), repr(r.avg_speed),
                    repr(r.avg_density), int(r.censored)])


def read_csv(path):
    with open(path, newline="") as fh:
        return _read(fh)


def loads_csv(text):
    return _read(io.StringIO(text))


def _read(fh):
    reader = csv.reader(fh)
    header = next(reader)
    if header != CSV_HEADER:
        raise ValueError(f"unexpected dataset header: {header}")
    records = []
    for row in reader:
        spec = RoomSpec(float(row[2]), float(row[3]), float(row[4]),
                        float(row[5]), float(row[6]), int(row[7]))
        records.append(DatasetRecord(int(row[0]), int(row[1]), spec,
                                     float(row[8]), float(row[9]),
                                     float(row[10]), float(row[11]),
                                     bool(int(row[12]))))
    return records


def training_arrays(records):
    """(X, y) for surrogate training; censored rooms are excluded."""
    usable = [r for r in records if not r.censored]
    X = np.array([r.inputs() for r in usable], dtype=np.float64)
    y = np.array([r.tt for r in usable], dtype=np.float64)
    return X, y
