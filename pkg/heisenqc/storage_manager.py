"""
Handles reading and writing report files.

Responsibilities:
- Read JSON config files; write JSON reports (UTF-8, sorted keys, indent 2).
- Write CSV tables per RFC 4180 with floats in round-trip repr.
- Stamp reports and rows with the config hash and package version.
- Keep all file paths and disk operations isolated here.

Nothing written here depends on the clock, the host or absolute paths, so
identical runs give identical bytes.
"""

import csv
import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy
import scipy

from heisenqc import __version__
from heisenqc.errors import ConfigError


def _to_path(path: str | Path) -> Path:
    """Normalize input to a Path."""
    return Path(path)


def _ensure_parent_dir(path: Path) -> None:
    """Ensure the parent directory exists."""
    path.parent.mkdir(parents=True, exist_ok=True)


def _jsonable(value: Any) -> Any:
    """Plain JSON types; non-finite floats become strings."""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "tolist"):
        return _jsonable(value.tolist())
    if isinstance(value, float) and not math.isfinite(value):
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    return value


def load_data(file_path: str | Path, default: Any = None) -> Any:
    """Load JSON data from file_path; a missing file gives default, invalid JSON is a ConfigError."""
    path = _to_path(file_path)
    if not path.exists():
        if default is None:
            raise ConfigError(f"Config file not found: {path.name}")
        return default
    try:
        with path.open("r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"Config file {path.name} is not valid JSON: {e.msg} (line {e.lineno})") from e
    except (OSError, UnicodeDecodeError) as e:
        raise ConfigError(f"Config file {path.name} could not be read ({type(e).__name__})") from e


def save_data(file_path: str | Path, data: Any) -> Path:
    """Write JSON data to file_path. Creates parent directories if needed."""
    path = _to_path(file_path)
    _ensure_parent_dir(path)
    with path.open("w", encoding="utf-8", newline="\n") as f:
        json.dump(_jsonable(data), f, ensure_ascii=False, indent=2, sort_keys=True, allow_nan=False)
        f.write("\n")
    return path


def _cell(value: Any) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def save_csv(
    file_path: str | Path,
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    config_hash: str,
) -> Path:
    """RFC 4180 CSV (CRLF, minimal quoting) with config_hash and version columns appended."""
    path = _to_path(file_path)
    _ensure_parent_dir(path)
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\r\n")
        writer.writerow([*header, "config_hash", "version"])
        for row in rows:
            writer.writerow([*(_cell(v) for v in row), config_hash, __version__])
    return path


def stamp(report: dict, config: dict, config_hash: str, schema_version: int) -> dict:
    """Report with the resolved config and provenance metadata attached."""
    return {
        **report,
        "meta": {
            "config_hash": config_hash,
            "versions": {"heisenqc": __version__, "numpy": numpy.__version__, "scipy": scipy.__version__},
            "schema_version": schema_version,
        },
        "config": config,
    }
