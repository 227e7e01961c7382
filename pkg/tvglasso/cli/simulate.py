"""
simulate: generate an evolving-graph trajectory and sample data along it.

Writes <out>/trajectory.jsonl and <out>/data.csv.
"""

import argparse

from tvglasso.cli import deps
from tvglasso.core.logging import get_logger
from tvglasso.schemas.run import SimulateRun
from tvglasso.services import simgen

logger = get_logger(__name__)

TRAJECTORY_FILE = "trajectory.jsonl"
DATA_FILE = "data.csv"


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("simulate", help="Generate a trajectory and sample data")
    deps.add_common_arguments(parser)
    parser.add_argument("--p", type=int, default=None, help="Dimension")
    parser.add_argument("--steps", type=int, default=None, help="Number of time steps n")
    parser.add_argument("--base-diag", type=float, default=None)
    parser.add_argument("--initial-edges", type=int, default=None)
    parser.add_argument("--churn-period", type=int, default=None)
    parser.add_argument("--churn-count", type=int, default=None)
    parser.add_argument("--churn-rounds", type=int, default=None)
    parser.add_argument("--weight-range", type=deps.float_list, default=None, help="low,high")
    parser.add_argument("--sample-seed", type=int, default=None)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    """
    cmd_simulate: write the trajectory JSON lines and the data CSV.

    Identical configuration and seed produce identical bytes.
    """
    config = deps.load_run_config(
        SimulateRun,
        args,
        {
            "p": args.p,
            "steps": args.steps,
            "base_diag": args.base_diag,
            "initial_edges": args.initial_edges,
            "churn_period": args.churn_period,
            "churn_count": args.churn_count,
            "churn_rounds": args.churn_rounds,
            "weight_range": args.weight_range,
            "seed": args.seed,
            "sample_seed": args.sample_seed,
            "out": args.out,
        },
    )

    trajectory = simgen.generate_trajectory(config)
    data = simgen.sample_data(trajectory, config.sample_seed)

    out = deps.output_dir(config.out)
    simgen.export_trajectory(trajectory, out / TRAJECTORY_FILE)
    simgen.export_data(data, out / DATA_FILE)

    logger.info("simulation_written", out=str(out), steps=trajectory.steps, p=trajectory.p)
    return 0
