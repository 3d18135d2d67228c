"""
CSV artifacts.

Every file opens with a `# schema:` comment naming each column and its unit,
followed by the plain header row. Floats are written as `%.12e` so that
identical runs produce byte-identical files.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Iterable, Sequence, Tuple

import structlog

from src.models.domain import FullLinearSystem
from src.models.errors import ArtifactError
from src.physics.fluctuations import matrix_rows

log = structlog.get_logger(__name__)

Column = Tuple[str, str]


def _cell(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if math.isnan(value):
            return "nan"
        return f"{value:.12e}"
    return str(value)


def write_csv(path: str | Path, columns: Sequence[Column], rows: Iterable[Sequence]) -> Path:
    """
    Write rows under a schema header.

    Args:
        path: Destination file; parent directories are created
        columns: (name, unit) pairs
        rows: Sequences with one value per column

    Raises:
        ArtifactError: If the directory or file cannot be written

    Returns:
        The written path
    """
    path = Path(path)
    schema = ",".join(f"{name}[{unit}]" for name, unit in columns)
    count = 0
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as fh:
            fh.write(f"# schema: {schema}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow([name for name, _ in columns])
            for row in rows:
                if len(row) != len(columns):
                    raise ValueError(f"row has {len(row)} values, expected {len(columns)}")
                writer.writerow([_cell(v) for v in row])
                count += 1
    except OSError as exc:
        raise ArtifactError(f"cannot write {path}: {exc.strerror or exc}") from exc
    log.info("artifact written", path=str(path), rows=count)
    return path


def read_csv(path: str | Path) -> Tuple[list[str], list[list[str]]]:
    """Header and rows of an artifact, skipping the schema comment."""
    with Path(path).open(encoding="utf-8", newline="") as fh:
        lines = [line for line in fh if not line.startswith("#")]
    reader = csv.reader(lines)
    header = next(reader)
    return header, list(reader)


def dump_matrix(full: FullLinearSystem, path: str | Path) -> Path:
    """Row-major dump of the dimensionless 14x14 drift."""
    columns = [("row", "index"), ("col", "index"), ("re", "gamma"), ("im", "gamma")]
    return write_csv(path, columns, matrix_rows(full))
