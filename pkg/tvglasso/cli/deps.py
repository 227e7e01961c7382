"""
Shared command dependencies: configuration layering, common flags and
artifact helpers.
"""

import argparse
from pathlib import Path
from typing import Any, Dict, List, Optional, Type, TypeVar

import numpy as np
from pydantic import BaseModel, ValidationError

from tvglasso.core.exceptions import ArtifactFormatError, ConfigInvalid
from tvglasso.core.logging import get_logger
from tvglasso.schemas.kernel import KernelFamily, KernelSpec
from tvglasso.services import kernel
from tvglasso.utils import io

logger = get_logger(__name__)

RunModel = TypeVar("RunModel", bound=BaseModel)


def float_list(text: str) -> List[float]:
    """Comma-separated floats"""
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"Expected comma-separated numbers, got '{text}'") from e


def int_list(text: str) -> List[int]:
    """Comma-separated integers"""
    try:
        return [int(item) for item in text.split(",") if item.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"Expected comma-separated integers, got '{text}'") from e


def add_common_arguments(parser: argparse.ArgumentParser) -> None:
    """--config, --seed, --out and --threads; absent flags leave the config untouched"""
    parser.add_argument("--config", help="JSON file with run parameters")
    parser.add_argument("--seed", type=int, default=None, help="Random seed")
    parser.add_argument("--out", default=None, help="Output directory")
    parser.add_argument("--threads", type=int, default=None, help="Worker cap")


def add_smoothing_arguments(parser: argparse.ArgumentParser) -> None:
    """Kernel, bandwidth and penalty-scope flags"""
    parser.add_argument(
        "--kernel", choices=[family.value for family in KernelFamily], default=None
    )
    parser.add_argument("--bandwidth", type=float, default=None, help="Bandwidth h in (0, 1]")
    parser.add_argument(
        "--penalize-diagonal", action="store_true", default=None, help="Penalize θ_ii too"
    )
    parser.add_argument("--zero-tol", type=float, default=None, help="Edge threshold")


def load_run_config(
    model: Type[RunModel],
    args: argparse.Namespace,
    overrides: Dict[str, Any],
) -> RunModel:
    """
    Merge defaults, the --config JSON file and explicit flags.

    Args:
        model: Run configuration schema
        args: Parsed arguments (``config`` names the optional JSON file)
        overrides: Flag values keyed by schema field; None means "not given"

    Returns:
        Validated run configuration

    Raises:
        ConfigInvalid: If the merged configuration does not validate
    """
    values: Dict[str, Any] = {}
    config_path: Optional[str] = getattr(args, "config", None)
    if config_path:
        try:
            loaded = io.read_json(config_path)
        except ArtifactFormatError as e:
            raise ConfigInvalid(str(e)) from e
        if not isinstance(loaded, dict):
            raise ConfigInvalid(f"{config_path}: expected a JSON object")
        values.update(loaded)

    values.update({key: value for key, value in overrides.items() if value is not None})

    try:
        config = model.model_validate(values)
    except ValidationError as e:
        raise ConfigInvalid(f"Invalid {model.__name__}: {e}") from e

    logger.debug("run_config_loaded", model=model.__name__, source=config_path)
    return config


def output_dir(path: str) -> Path:
    """Create the output directory"""
    target = Path(path)
    target.mkdir(parents=True, exist_ok=True)
    return target


def kernel_spec(family: KernelFamily, bandwidth: Optional[float], n: int, scale: float) -> KernelSpec:
    """Explicit bandwidth, else h = min(1, scale / n^(1/3))"""
    h = bandwidth if bandwidth is not None else kernel.reference_bandwidth(n, scale=scale)
    return KernelSpec(family=family, bandwidth=h)


def matrix_payload(matrix: np.ndarray, meta: Dict[str, Any]) -> Dict[str, Any]:
    """{"p": int, "entries": row-major list, "meta": {...}}"""
    array = np.asarray(matrix, dtype=np.float64)
    return {
        "p": int(array.shape[0]),
        "entries": [float(v) for v in array.reshape(-1)],
        "meta": meta,
    }


def read_matrix(path: str) -> np.ndarray:
    """
    Read a matrix JSON artifact.

    Raises:
        ArtifactFormatError: If "p" and "entries" are inconsistent
    """
    payload = io.read_json(path)
    try:
        p = int(payload["p"])
        entries = np.array(payload["entries"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as e:
        raise ArtifactFormatError(f"{path}: malformed matrix artifact ({e})") from e
    if entries.size != p * p:
        raise ArtifactFormatError(f"{path}: {entries.size} entries for p={p}")
    return entries.reshape(p, p)

