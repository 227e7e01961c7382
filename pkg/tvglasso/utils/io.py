"""
Artifact reading and writing.

Every writer produces deterministic bytes: UTF-8, "\n" line endings, keys
in insertion order, floats in shortest round-trip form. OSError from the
filesystem propagates unchanged.
"""

import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from tvglasso.core.exceptions import ArtifactFormatError
from tvglasso.core.logging import get_logger

logger = get_logger(__name__)

PathLike = Union[str, Path]


def _ensure_parent(path: PathLike) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    return target


def _default(value: Any) -> Any:
    """JSON fallback for numpy scalars and arrays"""
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def dumps(payload: Any) -> str:
    """Compact JSON with non-finite numbers rejected"""
    return json.dumps(payload, default=_default, allow_nan=False, ensure_ascii=False)


def write_json(path: PathLike, payload: Any) -> None:
    """Write a JSON document (indented, trailing newline)"""
    target = _ensure_parent(path)
    text = json.dumps(payload, default=_default, allow_nan=False, ensure_ascii=False, indent=2)
    target.write_text(text + "\n", encoding="utf-8", newline="\n")
    logger.debug("json_written", path=str(target))


def read_json(path: PathLike) -> Any:
    """
    Read a JSON document.

    Raises:
        ArtifactFormatError: If the file is not valid JSON
    """
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ArtifactFormatError(f"{path}: invalid JSON ({e})") from e


def write_jsonl(path: PathLike, records: Iterable[Dict[str, Any]]) -> None:
    """One compact JSON object per line"""
    target = _ensure_parent(path)
    with target.open("w", encoding="utf-8", newline="\n") as handle:
        for record in records:
            handle.write(dumps(record))
            handle.write("\n")
    logger.debug("jsonl_written", path=str(target))


def read_jsonl(path: PathLike) -> List[Dict[str, Any]]:
    """
    Read JSON lines, skipping blank lines.

    Raises:
        ArtifactFormatError: On an unparseable line
    """
    records = []
    with Path(path).open("r", encoding="utf-8") as handle:
        for number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as e:
                raise ArtifactFormatError(f"{path}:{number}: invalid JSON ({e})") from e
    return records


def write_frame(path: PathLike, frame: pd.DataFrame) -> None:
    """CSV without index; missing values become empty cells"""
    target = _ensure_parent(path)
    frame.to_csv(target, index=False, na_rep="", lineterminator="\n", encoding="utf-8")
    logger.debug("csv_written", path=str(target), rows=len(frame))


def write_rows(
    path: PathLike, rows: Sequence[Dict[str, Any]], columns: Optional[Sequence[str]] = None
) -> None:
    """CSV from dict rows in the given column order"""
    # object dtype keeps ints as ints next to None cells
    frame = pd.DataFrame(list(rows), columns=list(columns) if columns else None, dtype=object)
    write_frame(path, frame)


def read_frame(path: PathLike) -> pd.DataFrame:
    """
    Read a CSV with exact float round-tripping.

    Raises:
        ArtifactFormatError: If the file cannot be parsed
    """
    try:
        return pd.read_csv(path, float_precision="round_trip")
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise ArtifactFormatError(f"{path}: {e}") from e
