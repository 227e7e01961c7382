"""
track: how quickly the smoothed estimator picks up edges being added and
drops edges being removed.

Writes <out>/track.csv with one row per churned edge lifetime and kind.
"""

import argparse
from typing import Dict, List, Optional

import numpy as np

from tvglasso.cli import deps
from tvglasso.core.exceptions import DimensionMismatch
from tvglasso.core.logging import get_logger
from tvglasso.models.graph import EdgeSet
from tvglasso.models.trajectory import EdgeEvent, GraphTrajectory
from tvglasso.schemas.penalty import PenaltySpec
from tvglasso.schemas.run import TrackRun
from tvglasso.services import glasso, kernel, simgen
from tvglasso.utils import io
from tvglasso.utils.parallel import ordered_map

logger = get_logger(__name__)

TRACK_FILE = "track.csv"
TRACK_COLUMNS = [
    "i",
    "j",
    "kind",
    "birth_step",
    "death_step",
    "truth_step",
    "estimated_step",
    "latency",
]


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("track", help="Edge appearance/removal latency")
    deps.add_common_arguments(parser)
    deps.add_smoothing_arguments(parser)
    parser.add_argument("--data", default=None, help="Data CSV (t,z1,...,zp)")
    parser.add_argument("--truth", default=None, help="Trajectory JSON lines")
    parser.add_argument("--lambda", dest="lam", type=float, default=None, help="Penalty λ")
    parser.add_argument("--stride", type=int, default=None, help="Evaluate every stride steps")
    parser.add_argument(
        "--oracle", action="store_true", default=None, help="Track Θ(t) itself instead of Θ̂(t)"
    )
    parser.set_defaults(handler=run)


def first_present(
    edge: tuple, steps: List[int], estimates: Dict[int, EdgeSet], start: int, stop: int
) -> Optional[int]:
    """First evaluated step in [start, stop) whose estimate contains the edge"""
    for step in steps:
        if start <= step < stop and edge in estimates[step]:
            return step
    return None


def removal_step(
    edge: tuple, steps: List[int], estimates: Dict[int, EdgeSet], start: int, stop: int
) -> Optional[int]:
    """
    Evaluated step following the last one in [start, stop) that contains the
    edge; None when the edge is still present at the last such step.
    """
    window = [step for step in steps if start <= step < stop]
    present = [step for step in window if edge in estimates[step]]
    if not present:
        return window[0] if window else None
    later = [step for step in window if step > present[-1]]
    return later[0] if later else None


def latency_rows(
    truth: GraphTrajectory, steps: List[int], estimates: Dict[int, EdgeSet]
) -> List[Dict[str, object]]:
    """
    Rows for every lifetime that ramps in (kind "added") or decays out
    (kind "removed") during the run.

    Added edges are scored from their first nonzero-weight step, removed
    edges from the step their decay completes.
    """
    events: List[EdgeEvent] = simgen.edge_events(truth)
    next_birth: Dict[int, int] = {}
    by_edge: Dict[tuple, List[int]] = {}
    for index, event in enumerate(events):
        by_edge.setdefault(event.edge, []).append(index)
    for indices in by_edge.values():
        for current, following in zip(indices, indices[1:]):
            next_birth[current] = events[following].birth_step

    rows: List[Dict[str, object]] = []
    edge_column = {edge: e for e, edge in enumerate(truth.edges)}
    for index, event in enumerate(events):
        edge = event.edge
        stop = next_birth.get(index, truth.steps)
        ramped = truth.weights[event.birth_step, edge_column[edge]] == 0.0

        if ramped:
            truth_step = event.birth_step + 1
            estimated = first_present(edge, steps, estimates, event.birth_step, stop)
            rows.append(_row(event, "added", truth_step, estimated))
        if event.death_step is not None:
            # a re-birth step still has zero weight, so it belongs to the gap
            removal_stop = stop + 1 if index in next_birth else stop
            estimated = removal_step(edge, steps, estimates, event.birth_step, removal_stop)
            rows.append(_row(event, "removed", event.death_step, estimated))

    rows.sort(key=lambda row: (row["kind"], row["truth_step"], row["i"], row["j"]))
    return rows


def _row(event: EdgeEvent, kind: str, truth_step: int, estimated: Optional[int]) -> Dict[str, object]:
    return {
        "i": event.edge[0],
        "j": event.edge[1],
        "kind": kind,
        "birth_step": event.birth_step,
        "death_step": event.death_step,
        "truth_step": truth_step,
        "estimated_step": estimated,
        "latency": None if estimated is None else estimated - truth_step,
    }


def run(args: argparse.Namespace) -> int:
    """cmd_track: edge-latency CSV along the series"""
    config = deps.load_run_config(
        TrackRun,
        args,
        {
            "data": args.data,
            "truth": args.truth,
            "lam": args.lam,
            "kernel": args.kernel,
            "bandwidth": args.bandwidth,
            "stride": args.stride,
            "penalize_diagonal": args.penalize_diagonal,
            "zero_tol": args.zero_tol,
            "oracle": args.oracle,
            "threads": args.threads,
            "out": args.out,
        },
    )

    truth = simgen.load_trajectory(config.truth)
    data = simgen.load_data(config.data)
    if truth.steps != data.n or truth.p != data.p:
        raise DimensionMismatch(
            f"Truth has {truth.steps} steps of p={truth.p}, data has {data.n} rows of p={data.p}"
        )
    if not np.allclose(truth.times, data.times, rtol=0.0, atol=1e-12):
        raise DimensionMismatch("Truth and data time grids differ")

    steps = list(range(0, truth.steps, config.stride))
    spec = deps.kernel_spec(config.kernel, config.bandwidth, data.n, config.bandwidth_scale)
    penalty = PenaltySpec(lam=config.lam, penalize_diagonal=config.penalize_diagonal)

    def estimate_edges(step: int) -> EdgeSet:
        if config.oracle:
            return glasso.edges_of(truth.theta_array(step), config.zero_tol)
        s_hat = kernel.smoothed_covariance(data, float(truth.times[step]), spec)
        result = glasso.fit(s_hat, penalty, tol=config.tol, max_iter=config.max_iter)
        return glasso.edges_of(result.theta, config.zero_tol)

    estimates = dict(zip(steps, ordered_map(estimate_edges, steps, config.threads)))
    rows = latency_rows(truth, steps, estimates)

    out = deps.output_dir(config.out)
    io.write_rows(out / TRACK_FILE, rows, columns=TRACK_COLUMNS)
    logger.info(
        "track_written",
        out=str(out),
        evaluations=len(steps),
        rows=len(rows),
        oracle=config.oracle,
    )
    return 0
