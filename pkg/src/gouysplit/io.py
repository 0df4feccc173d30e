"""Plot-ready CSV output.

Layout: ``# key=value`` metadata lines, one header row, then numeric rows.
Numbers are printed with 17 significant digits so a re-read is bit-exact;
line endings are LF.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True, eq=False)
class GridOutput:
    name: str
    columns: tuple
    data: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        data = np.atleast_2d(np.asarray(self.data, dtype=float))
        if data.shape[1] != len(self.columns):
            raise ValueError(f"{len(self.columns)} columns named but data has {data.shape[1]}")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "columns", tuple(self.columns))

    @property
    def filename(self) -> str:
        return f"{self.name}.csv"

    def column(self, name) -> np.ndarray:
        return self.data[:, self.columns.index(name)]


def format_value(v) -> str:
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def long_format(name, axes, values, value_name, metadata) -> GridOutput:
    """Flatten a 2D array ``values[i, j]`` over ``axes = ((name0, a0), (name1, a1))``
    into rows ``a0[i], a1[j], values[i, j]``."""
    (n0, a0), (n1, a1) = axes
    A0, A1 = np.meshgrid(a0, a1, indexing="ij")
    data = np.column_stack([A0.ravel(), A1.ravel(), np.asarray(values).ravel()])
    return GridOutput(name, (n0, n1, value_name), data, metadata)


def write_grid(output: GridOutput, path) -> str:
    """Write one output as CSV. OS errors propagate with the path attached."""
    path = os.fspath(path)
    lines = [f"# {k}={format_value(v)}" for k, v in output.metadata.items()]
    lines.append(",".join(output.columns))
    for row in output.data:
        lines.append(",".join(format(float(v), ".17g") for v in row))
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}", path) from exc
    return path


def read_grid(path) -> GridOutput:
    metadata, header, rows = {}, None, []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                metadata[key] = value
            elif header is None:
                header = tuple(line.split(","))
            elif line:
                rows.append([float(v) for v in line.split(",")])
    name = os.path.splitext(os.path.basename(path))[0]
    data = np.array(rows, dtype=float).reshape(-1, len(header))
    return GridOutput(name, header, data, metadata)
