"""
devlab: verification experiments.

Each subcommand writes <out>/<name>.csv and a JSON summary
<out>/<name>.json of the form {experiment, config, statistics, fitted}.
"""

import argparse
from pathlib import Path
from typing import Any, Callable, Dict, List, Sequence, Tuple

from pydantic import BaseModel

from tvglasso.cli import deps
from tvglasso.core.logging import get_logger
from tvglasso.schemas.experiment import (
    BiasConfig,
    ConsistencyConfig,
    ExperimentSummary,
    MgfConfig,
    RateExperimentConfig,
    TailGridConfig,
)
from tvglasso.schemas.kernel import KernelFamily
from tvglasso.services import devlab
from tvglasso.utils import io

logger = get_logger(__name__)

KERNEL_CHOICES = [family.value for family in KernelFamily]


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("devlab", help="Verification experiments")
    lab = parser.add_subparsers(dest="experiment", required=True)

    mgf = lab.add_parser("mgf", help="Closed-form MGF of a Gaussian product")
    deps.add_common_arguments(mgf)
    mgf.add_argument("--t", dest="t_values", type=deps.float_list, default=None)
    mgf.add_argument("--sigma-i", type=float, default=None)
    mgf.add_argument("--sigma-j", type=float, default=None)
    mgf.add_argument("--rho", type=float, default=None)
    mgf.add_argument("--draws", type=int, default=None, help="Monte-Carlo draws (0 = none)")
    mgf.set_defaults(handler=run_mgf)

    bias = lab.add_parser("bias", help="Deterministic smoother bias over bandwidths")
    deps.add_common_arguments(bias)
    bias.add_argument("--t0", type=float, default=None)
    bias.add_argument("--kernel", choices=KERNEL_CHOICES, default=None)
    bias.add_argument("--h-values", type=deps.float_list, default=None)
    bias.add_argument("--n", type=int, default=None)
    bias.set_defaults(handler=run_bias)

    tail = lab.add_parser("tail", help="Monte-Carlo tail probabilities over n")
    deps.add_common_arguments(tail)
    tail.add_argument("--n-values", type=deps.int_list, default=None)
    tail.add_argument("--epsilon", type=float, default=None)
    tail.add_argument("--replicates", type=int, default=None)
    tail.add_argument("--kernel", choices=KERNEL_CHOICES, default=None)
    tail.add_argument("--h-scale", type=float, default=None)
    tail.add_argument("--t0", type=float, default=None)
    tail.set_defaults(handler=run_tail)

    rate = lab.add_parser("rate", help="Frobenius error of Θ̂_n(t0) over n")
    deps.add_common_arguments(rate)
    rate.add_argument("--n-values", type=deps.int_list, default=None)
    rate.add_argument("--replicates", type=int, default=None)
    rate.add_argument("--lambda-scale", type=float, default=None)
    rate.add_argument("--kernel", choices=KERNEL_CHOICES, default=None)
    rate.set_defaults(handler=run_rate)

    consistency = lab.add_parser("consistency", help="Max-entry error of Ŝ_n(t0) over n")
    deps.add_common_arguments(consistency)
    consistency.add_argument("--n-values", type=deps.int_list, default=None)
    consistency.add_argument("--replicates", type=int, default=None)
    consistency.add_argument("--kernel", choices=KERNEL_CHOICES, default=None)
    consistency.set_defaults(handler=run_consistency)


def _write(
    args: argparse.Namespace,
    name: str,
    config: BaseModel,
    rows: Sequence[BaseModel],
    statistics: Dict[str, Any],
    fitted: Dict[str, Any],
) -> Path:
    out = deps.output_dir(args.out or "devlab")
    records = [row.model_dump(by_alias=True) for row in rows]
    columns = list(records[0]) if records else None
    io.write_rows(out / f"{name}.csv", records, columns=columns)
    summary = ExperimentSummary(
        experiment=name,
        config=config.model_dump(mode="json"),
        statistics=statistics,
        fitted=fitted,
    )
    io.write_json(out / f"{name}.json", summary.model_dump(mode="json"))
    logger.info("experiment_written", experiment=name, out=str(out), rows=len(rows))
    return out


def _run(
    args: argparse.Namespace,
    name: str,
    model: type,
    overrides: Dict[str, Any],
    body: Callable[[Any], Tuple[List[BaseModel], Dict[str, Any], Dict[str, Any]]],
) -> int:
    config = deps.load_run_config(model, args, overrides)
    rows, statistics, fitted = body(config)
    _write(args, name, config, rows, statistics, fitted)
    return 0


def run_mgf(args: argparse.Namespace) -> int:
    def body(config: MgfConfig) -> Tuple[List[BaseModel], Dict[str, Any], Dict[str, Any]]:
        rows = devlab.mgf_table(config)
        z_scores = [
            abs(row.monte_carlo_mean - row.mgf) / row.monte_carlo_stderr
            for row in rows
            if row.monte_carlo_mean is not None and row.monte_carlo_stderr
        ]
        return rows, {"max_abs_z_score": max(z_scores) if z_scores else None}, {}

    overrides = {
        "t_values": args.t_values,
        "sigma_i": args.sigma_i,
        "sigma_j": args.sigma_j,
        "rho": args.rho,
        "draws": args.draws,
        "seed": args.seed,
    }
    return _run(args, "mgf", MgfConfig, overrides, body)


def run_bias(args: argparse.Namespace) -> int:
    def body(config: BiasConfig) -> Tuple[List[BaseModel], Dict[str, Any], Dict[str, Any]]:
        rows = devlab.bias_experiment(config)
        return rows, {"ratios": devlab.bias_ratios(rows)}, {}

    overrides = {"t0": args.t0, "family": args.kernel, "h_values": args.h_values, "n": args.n}
    return _run(args, "bias", BiasConfig, overrides, body)


def run_tail(args: argparse.Namespace) -> int:
    def body(config: TailGridConfig) -> Tuple[List[BaseModel], Dict[str, Any], Dict[str, Any]]:
        rows = devlab.tail_grid(config, args.threads)
        envelope = devlab.fit_tail_envelope(rows)
        statistics = {
            "non_increasing_fraction": devlab.non_increasing_fraction(
                [row.empirical_tail for row in rows]
            ),
            "chernoff_dominates": all(row.empirical_tail <= row.chernoff_bound for row in rows),
        }
        return rows, statistics, envelope.model_dump()

    overrides = {
        "n_values": args.n_values,
        "epsilon": args.epsilon,
        "replicates": args.replicates,
        "family": args.kernel,
        "h_scale": args.h_scale,
        "t0": args.t0,
        "seed": args.seed,
    }
    return _run(args, "tail", TailGridConfig, overrides, body)


def run_rate(args: argparse.Namespace) -> int:
    def body(config: RateExperimentConfig) -> Tuple[List[BaseModel], Dict[str, Any], Dict[str, Any]]:
        rows, slope = devlab.frobenius_rate(config, args.threads)
        errors = [row.mean_frobenius_error for row in rows]
        statistics = {"strictly_decreasing": all(b < a for a, b in zip(errors, errors[1:]))}
        return rows, statistics, {"loglog_slope": slope}

    overrides = {
        "n_values": args.n_values,
        "replicates": args.replicates,
        "lambda_scale": args.lambda_scale,
        "family": args.kernel,
        "seed": args.seed,
    }
    return _run(args, "rate", RateExperimentConfig, overrides, body)


def run_consistency(args: argparse.Namespace) -> int:
    def body(config: ConsistencyConfig) -> Tuple[List[BaseModel], Dict[str, Any], Dict[str, Any]]:
        rows, slope = devlab.consistency_curve(config, args.threads)
        return rows, {}, {"loglog_slope": slope}

    overrides = {
        "n_values": args.n_values,
        "replicates": args.replicates,
        "family": args.kernel,
        "seed": args.seed,
    }
    return _run(args, "consistency", ConsistencyConfig, overrides, body)
