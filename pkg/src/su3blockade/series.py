"""Sampled expectation values and their CSV form."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ValidationError

__all__ = ["TimeSeries", "check_grid", "fmt", "write_csv"]


def fmt(x: float) -> str:
    """17 significant digits: round-trips any double."""
    return format(float(x), ".17g")


def check_grid(times) -> np.ndarray:
    t = np.atleast_1d(np.asarray(times, dtype=float))
    if t.ndim != 1 or t.size == 0:
        raise ValidationError("time grid must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(t)):
        raise ValidationError("time grid must be finite")
    if t.size > 1 and np.any(np.diff(t) <= 0):
        raise ValidationError("time grid must be strictly increasing")
    return t


@dataclass(frozen=True)
class TimeSeries:
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if len(self.times) != len(self.values):
            raise ValidationError("times and values differ in length")

    def __len__(self):
        return len(self.times)

    def to_csv(self, path: str | Path, header: str = "value") -> None:
        write_csv(path, ["t", header], [self.times, self.values])


def write_csv(path: str | Path, columns: list[str], data: list) -> None:
    cols = [np.asarray(c, dtype=float) for c in data]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        for row in zip(*cols):
            w.writerow([fmt(x) for x in row])
