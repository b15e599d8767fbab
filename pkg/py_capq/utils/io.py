import csv
import json
import math
from dataclasses import dataclass
from typing import Any, List

import numpy as np
import numpy.typing as npt

from ..exceptions import DataError, FileOperationError
from ..schema import Sample


def load_json(filepath: str) -> Any:
    try:
        with open(filepath, 'r', encoding='utf-8') as f:
            return json.load(f)
    except (IOError, json.JSONDecodeError) as e:
        raise FileOperationError(f"Failed to load JSON from {filepath}: {e}") from e


def save_text(filepath: str, content: str):
    try:
        with open(filepath, 'w', encoding='utf-8', newline='') as f:
            f.write(content)
    except IOError as e:
        raise FileOperationError(f"Failed to save text to {filepath}: {e}") from e


@dataclass(frozen=True)
class Measurements:
    """Parsed measurement file: one column per quality characteristic."""
    header: List[str]
    values: npt.NDArray
    source: str

    @property
    def dimension(self) -> int:
        return self.values.shape[1]

    def sample(self) -> Sample:
        if self.dimension != 1:
            raise DataError(f"expected a single column in {self.source}, found {self.dimension}")
        return Sample(values=self.values[:, 0].tolist(), source=self.source)


def load_measurements(filepath: str) -> Measurements:
    """
    Reads a comma separated file with one header row and one numeric column
    per characteristic. Blank lines are skipped; every malformed line is
    reported at once.
    """
    try:
        with open(filepath, 'r', encoding='utf-8', newline='') as f:
            rows = list(csv.reader(f))
    except (IOError, UnicodeDecodeError) as e:
        raise FileOperationError(f"Failed to read measurements from {filepath}: {e}") from e

    if not rows:
        raise DataError(f"{filepath}: empty file, expected a header row")
    header = [cell.strip() for cell in rows[0]]
    width = len(header)

    parsed: List[List[float]] = []
    bad_lines: List[int] = []
    for line_no, row in enumerate(rows[1:], start=2):
        if not any(cell.strip() for cell in row):
            continue
        if len(row) != width:
            bad_lines.append(line_no)
            continue
        try:
            values = [float(cell) for cell in row]
        except ValueError:
            bad_lines.append(line_no)
            continue
        if not all(math.isfinite(v) for v in values):
            bad_lines.append(line_no)
            continue
        parsed.append(values)

    if bad_lines:
        raise DataError(f"{filepath}: non-numeric or malformed rows", lines=bad_lines)
    if not parsed:
        raise DataError(f"{filepath}: no observations")
    return Measurements(header=header, values=np.asarray(parsed, dtype=float), source=filepath)
