"""
estimate: fit Θ̂(t0) from a data CSV.

Writes <out>/precision.json and <out>/edges.csv (i, j, theta).
"""

import argparse
from pathlib import Path
from typing import Optional

from tvglasso.cli import deps
from tvglasso.core.exceptions import MaxIterationsExceeded
from tvglasso.core.logging import get_logger
from tvglasso.models.fit import GlassoFit
from tvglasso.schemas.kernel import KernelSpec
from tvglasso.schemas.penalty import PenaltySpec
from tvglasso.schemas.run import EstimateRun
from tvglasso.services import glasso, kernel, simgen
from tvglasso.utils import io

logger = get_logger(__name__)

PRECISION_FILE = "precision.json"
EDGES_FILE = "edges.csv"


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("estimate", help="Fit the smoothed graphical lasso at t0")
    deps.add_common_arguments(parser)
    deps.add_smoothing_arguments(parser)
    parser.add_argument("--data", default=None, help="Data CSV (t,z1,...,zp)")
    parser.add_argument("--t0", type=float, default=None, help="Point of estimation")
    parser.add_argument("--lambda", dest="lam", type=float, default=None, help="Penalty λ")
    parser.set_defaults(handler=run)


def _write(out: Path, result: GlassoFit, spec: KernelSpec, config: EstimateRun, n: int) -> None:
    zero_tol = config.zero_tol if config.zero_tol is not None else glasso.default_zero_tol(result.theta)
    edges = glasso.edges_of(result.theta, zero_tol)
    meta = {
        **result.meta(),
        "t0": config.t0,
        "h": spec.bandwidth,
        "kernel": spec.family.value,
        "n": n,
        "zero_tol": zero_tol,
        "edge_count": len(edges),
    }
    io.write_json(out / PRECISION_FILE, deps.matrix_payload(result.theta.entries, meta))
    theta = result.theta.entries
    io.write_rows(
        out / EDGES_FILE,
        [{"i": i, "j": j, "theta": float(theta[i, j])} for i, j in edges],
        columns=["i", "j", "theta"],
    )


def run(args: argparse.Namespace) -> int:
    """
    cmd_estimate: Θ̂(t0) as matrix JSON plus its edge list.

    A fit that hits the sweep cap still writes its best iterate, flagged
    ``meta.converged = false``, before the error propagates.
    """
    config = deps.load_run_config(
        EstimateRun,
        args,
        {
            "data": args.data,
            "t0": args.t0,
            "lam": args.lam,
            "kernel": args.kernel,
            "bandwidth": args.bandwidth,
            "penalize_diagonal": args.penalize_diagonal,
            "zero_tol": args.zero_tol,
            "threads": args.threads,
            "out": args.out,
        },
    )

    data = simgen.load_data(config.data)
    spec = deps.kernel_spec(config.kernel, config.bandwidth, data.n, config.bandwidth_scale)
    s_hat = kernel.smoothed_covariance(data, config.t0, spec)
    penalty = PenaltySpec(lam=config.lam, penalize_diagonal=config.penalize_diagonal)
    out = deps.output_dir(config.out)

    flagged: Optional[MaxIterationsExceeded] = None
    try:
        result = glasso.fit(s_hat, penalty, tol=config.tol, max_iter=config.max_iter)
    except MaxIterationsExceeded as e:
        if e.fit is None:
            raise
        flagged, result = e, e.fit

    _write(out, result, spec, config, data.n)
    logger.info(
        "estimate_written",
        out=str(out),
        t0=config.t0,
        lam=config.lam,
        converged=result.converged,
    )
    if flagged is not None:
        raise flagged
    return 0
