"""
Prometheus metrics for solver and experiment observability.

Metrics live in a dedicated registry and are written, on request, with the
textfile-collector convention for batch jobs. They never enter command
artifacts.
"""

from pathlib import Path
from typing import Union

from prometheus_client import CollectorRegistry, Counter, Histogram, write_to_textfile

from tvglasso.core.config import settings
from tvglasso.core.logging import get_logger

logger = get_logger(__name__)

registry = CollectorRegistry(auto_describe=True)

# Solver metrics
glasso_fits_total = Counter(
    "tvglasso_glasso_fits_total",
    "Graphical lasso fits by outcome",
    ["outcome"],
    registry=registry,
)

glasso_iterations = Histogram(
    "tvglasso_glasso_iterations",
    "Block sweeps needed to reach the KKT tolerance",
    buckets=(1, 2, 5, 10, 20, 50, 100, 200, 500, 1000),
    registry=registry,
)

# Simulation metrics
trajectories_generated_total = Counter(
    "tvglasso_trajectories_generated_total",
    "Evolving-graph trajectories generated",
    registry=registry,
)

# Monte-Carlo metrics
mc_replicates_total = Counter(
    "tvglasso_mc_replicates_total",
    "Monte-Carlo replicates simulated",
    ["experiment"],
    registry=registry,
)

# Command metrics
command_duration_seconds = Histogram(
    "tvglasso_command_duration_seconds",
    "Command wall-clock duration in seconds",
    ["command"],
    registry=registry,
)

command_failures_total = Counter(
    "tvglasso_command_failures_total",
    "Commands that exited with a nonzero code",
    ["command", "error_type"],
    registry=registry,
)


def write_metrics(path: Union[str, Path]) -> None:
    """
    Write the registry to a Prometheus textfile.

    Args:
        path: Destination file
    """
    if not settings.ENABLE_METRICS:
        logger.info("metrics_disabled_via_config")
        return
    write_to_textfile(str(path), registry)
    logger.info("metrics_written", path=str(path))
