"""
path: regularization path at t0 with one risk row per λ.

Writes <out>/path.csv (rows in increasing λ) and <out>/path_summary.json.
"""

import argparse
from typing import Any, Dict, List, Optional

from tvglasso.cli import deps
from tvglasso.core.exceptions import DimensionMismatch
from tvglasso.core.logging import get_logger
from tvglasso.models.fit import GlassoFit
from tvglasso.schemas.report import ORACLE_COLUMNS, RISK_REPORT_COLUMNS, RiskReport
from tvglasso.schemas.run import PathRun
from tvglasso.services import glasso, kernel, risk, simgen
from tvglasso.utils import io

logger = get_logger(__name__)

PATH_FILE = "path.csv"
SUMMARY_FILE = "path_summary.json"


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("path", help="Regularization path with risk report")
    deps.add_common_arguments(parser)
    deps.add_smoothing_arguments(parser)
    parser.add_argument("--data", default=None, help="Data CSV (t,z1,...,zp)")
    parser.add_argument("--t0", type=float, default=None, help="Point of estimation")
    parser.add_argument(
        "--lambdas", type=deps.float_list, default=None, help="Comma-separated λ grid"
    )
    parser.add_argument("--truth", default=None, help="Trajectory JSON lines for oracle columns")
    parser.set_defaults(handler=run)


def _matched_summary(oracle_fits: List[GlassoFit], fits: List[GlassoFit], sigma0: Any) -> Dict[str, Any]:
    pairs = risk.match_by_l1(oracle_fits, fits)
    wins = sum(
        1
        for oracle, empirical in pairs
        if risk.predictive_risk(oracle.sigma, sigma0) <= risk.predictive_risk(empirical.sigma, sigma0)
    )
    return {
        "matched_pairs": len(pairs),
        "oracle_not_worse": wins,
        "oracle_not_worse_fraction": wins / len(pairs) if pairs else None,
    }


def run(args: argparse.Namespace) -> int:
    """
    cmd_path: RiskReport CSV over a λ grid.

    The grid is fitted in decreasing order with warm starts and reported in
    increasing order. With ``--truth`` the oracle path on Σ(t0) fills the
    oracle columns and precision, recall and graph loss are scored against
    the true graph at t0.
    """
    config = deps.load_run_config(
        PathRun,
        args,
        {
            "data": args.data,
            "t0": args.t0,
            "lambdas": args.lambdas,
            "kernel": args.kernel,
            "bandwidth": args.bandwidth,
            "penalize_diagonal": args.penalize_diagonal,
            "zero_tol": args.zero_tol,
            "truth": args.truth,
            "threads": args.threads,
            "out": args.out,
        },
    )

    data = simgen.load_data(config.data)
    spec = deps.kernel_spec(config.kernel, config.bandwidth, data.n, config.bandwidth_scale)
    s_hat = kernel.smoothed_covariance(data, config.t0, spec)

    if config.lambdas is not None:
        grid = sorted(config.lambdas, reverse=True)
    else:
        grid = glasso.default_lambda_grid(s_hat, config.lambda_count, config.lambda_ratio)

    fits = glasso.regularization_path(
        s_hat, grid, config.penalize_diagonal, tol=config.tol, max_iter=config.max_iter
    )

    sigma0: Optional[Any] = None
    f_true = None
    oracle_fits: List[Optional[GlassoFit]] = [None] * len(fits)
    summary: Dict[str, Any] = {
        "t0": config.t0,
        "h": spec.bandwidth,
        "kernel": spec.family.value,
        "n": data.n,
        "lambdas": sorted(grid),
    }

    if config.truth is not None:
        truth = simgen.load_trajectory(config.truth)
        if truth.p != data.p:
            raise DimensionMismatch(f"Truth has p={truth.p}, data has p={data.p}")
        step = truth.step_index(config.t0)
        sigma0 = truth.sigma_array(step)
        f_true = truth.edge_set(step)
        oracle_path = glasso.regularization_path(
            sigma0, grid, config.penalize_diagonal, tol=config.tol, max_iter=config.max_iter
        )
        oracle_fits = list(oracle_path)
        summary["truth_step"] = step
        summary["true_edge_count"] = len(f_true)
        summary.update(_matched_summary(oracle_path, fits, sigma0))

    reports: List[RiskReport] = [
        risk.risk_report(fit, s_hat, sigma0, f_true, config.zero_tol, oracle)
        for fit, oracle in zip(fits, oracle_fits)
    ]
    reports.sort(key=lambda report: report.lam)

    with_oracle = config.truth is not None
    columns = RISK_REPORT_COLUMNS + (ORACLE_COLUMNS if with_oracle else [])
    out = deps.output_dir(config.out)
    io.write_rows(out / PATH_FILE, [r.to_row(with_oracle) for r in reports], columns=columns)
    io.write_json(out / SUMMARY_FILE, summary)

    logger.info("path_written", out=str(out), points=len(reports), with_oracle=with_oracle)
    return 0
