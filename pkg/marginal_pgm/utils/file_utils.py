"""
File utility functions for writing run artifacts.

JSON numbers are written with 17 significant digits so every double reads
back bit-for-bit.
"""
import json
import logging
import math
from fractions import Fraction
from pathlib import Path
from typing import Any, Union

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

FLOAT_FORMAT = ".17g"


def ensure_directory_exists(directory: Union[str, Path]) -> bool:
    """Ensure that a directory exists, creating it if necessary.

    Args:
        directory: Path to the directory.

    Returns:
        bool: True if the directory exists or was created, False otherwise.
    """
    try:
        Path(directory).mkdir(parents=True, exist_ok=True)
        return True
    except OSError as e:
        logger.error("Error creating directory %s: %s", directory, e)
        return False


def _plain(value: Any) -> Any:
    """Convert numpy, path and tuple values to JSON-ready Python values."""
    if isinstance(value, dict):
        return {str(k) if not isinstance(k, tuple) else ",".join(k): _plain(v)
                for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float, Fraction)):
        return float(value)
    if isinstance(value, Path):
        return str(value)
    return value


def _encode(value: Any, indent: str, level: int) -> str:
    pad, inner = indent * level, indent * (level + 1)
    if isinstance(value, float):
        return format(value, FLOAT_FORMAT) if math.isfinite(value) else "null"
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{inner}{json.dumps(k)}: {_encode(v, indent, level + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(value, list):
        if not value:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in value):
            return "[" + ", ".join(_encode(v, indent, level) for v in value) + "]"
        items = [inner + _encode(v, indent, level + 1) for v in value]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    return json.dumps(value)


def dumps(data: Any, indent: int = 2) -> str:
    """Serialize ``data`` as JSON with 17-significant-digit floats.

    Args:
        data: Data to serialize. Tuple keys are joined with commas and
            non-finite floats become null.
        indent: Spaces per nesting level.

    Returns:
        str: The JSON text, newline-terminated.
    """
    return _encode(_plain(data), " " * indent, 0) + "\n"


def write_json(data: Any, file_path: Union[str, Path]) -> Path:
    """Write ``data`` as JSON, creating parent directories.

    Args:
        data: JSON-ready data; numpy values, fractions and paths are converted.
        file_path: Destination file.

    Returns:
        Path: The written file.
    """
    path = Path(file_path)
    ensure_directory_exists(path.parent)
    path.write_text(dumps(data), encoding="utf-8")
    logger.debug("wrote %s", path)
    return path


def write_text(text: str, file_path: Union[str, Path]) -> Path:
    """Write UTF-8 text, creating parent directories.

    Args:
        text: Content to write.
        file_path: Destination file.

    Returns:
        Path: The written file.
    """
    path = Path(file_path)
    ensure_directory_exists(path.parent)
    path.write_text(text, encoding="utf-8")
    return path


def write_csv(frame: pd.DataFrame, file_path: Union[str, Path]) -> Path:
    """Write a DataFrame as CSV without its index, creating parent directories.

    Args:
        frame: Records to write.
        file_path: Destination file.

    Returns:
        Path: The written file.
    """
    path = Path(file_path)
    ensure_directory_exists(path.parent)
    frame.to_csv(path, index=False)
    logger.debug("wrote %d rows to %s", len(frame), path)
    return path
