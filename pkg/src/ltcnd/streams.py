"""CSV stream files and synthetic stream generators."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, TextIO

import numpy as np

from .errors import InvalidParameterError, ParseError
from .geometry import TransmittedPoint

KINDS = ("constant", "collinear", "random_walk", "sinusoid", "uniform")


@dataclass
class StreamFile:
    t: np.ndarray
    values: np.ndarray  # (m, n)
    header: list[str] | None = None

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=np.float64)
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim == 1:
            self.values = self.values[:, None]

    @property
    def n(self) -> int:
        return self.values.shape[1]

    def __len__(self) -> int:
        return self.t.shape[0]

    @property
    def column_names(self) -> list[str]:
        if self.header:
            return list(self.header[1:])
        return [f"x{i}" for i in range(self.n)]

    def select(self, dims: Sequence[str | int] | None) -> "StreamFile":
        """Keep only some value columns, by name or 0-based value-column index."""
        if not dims:
            return self
        names = self.column_names
        idx = []
        for d in dims:
            if isinstance(d, str) and d in names:
                idx.append(names.index(d))
                continue
            try:
                i = int(d)
            except (TypeError, ValueError):
                raise InvalidParameterError(f"unknown column {d!r}; have {names}") from None
            if not 0 <= i < self.n:
                raise InvalidParameterError(f"column index {i} outside 0..{self.n - 1}")
            idx.append(i)
        header = [self.header[0]] + [names[i] for i in idx] if self.header else None
        return StreamFile(self.t, self.values[:, idx], header)

    @classmethod
    def from_points(cls, tx: Sequence[TransmittedPoint], header: list[str] | None = None) -> "StreamFile":
        t = np.array([p.tau for p in tx], dtype=np.float64)
        values = np.stack([np.atleast_1d(p.xi) for p in tx]) if tx else np.zeros((0, 1))
        return cls(t, values, header)

    def to_points(self) -> list[TransmittedPoint]:
        return [TransmittedPoint(float(t), x.copy()) for t, x in zip(self.t, self.values)]


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def read_stream(handle: TextIO) -> StreamFile:
    rows = csv.reader(handle)
    header = None
    times: list[float] = []
    values: list[list[float]] = []
    arity = None
    for lineno, row in enumerate(rows, start=1):
        if not row or all(not c.strip() for c in row):
            continue
        cells = [c.strip() for c in row]
        if header is None and not times and not all(_is_number(c) for c in cells):
            header = cells
            arity = len(cells)
            continue
        if arity is None:
            arity = len(cells)
        if len(cells) != arity:
            raise ParseError(f"expected {arity} columns, found {len(cells)}", lineno)
        if arity < 2:
            raise ParseError("need a time column and at least one value column", lineno)
        try:
            nums = [float(c) for c in cells]
        except ValueError:
            raise ParseError(f"non-numeric cell in {cells}", lineno) from None
        if not all(math.isfinite(v) for v in nums):
            raise ParseError(f"non-finite cell in {cells}", lineno)
        if times and not nums[0] > times[-1]:
            raise ParseError(f"timestamp {nums[0]} is not after {times[-1]} (non-monotone)", lineno)
        times.append(nums[0])
        values.append(nums[1:])
    if not times:
        raise ParseError("stream has no samples")
    return StreamFile(np.array(times), np.array(values), header)


def parse_stream(path: str | Path) -> StreamFile:
    with open(path, newline="", encoding="utf-8") as fh:
        return read_stream(fh)


def _fmt(value: float) -> str:
    # repr is the shortest round-tripping form, which keeps output deterministic.
    return repr(float(value))


def format_stream(stream: StreamFile) -> str:
    buf = io.StringIO()
    header = stream.header or (["t"] + stream.column_names)
    buf.write(",".join(header) + "\n")
    for t, row in zip(stream.t, stream.values):
        buf.write(",".join([_fmt(t)] + [_fmt(v) for v in row]) + "\n")
    return buf.getvalue()


def write_stream(path: str | Path, stream: StreamFile) -> None:
    Path(path).write_text(format_stream(stream), encoding="utf-8")


def generate_synthetic(kind: str, n: int, length: int, seed: int = 0, amplitude: float = 1.0,
                       rate: float = 50.0) -> StreamFile:
    """Deterministic synthetic streams sampled at ``rate`` Hz.

    ``sinusoid`` mixes a few periodic components with noise, roughly like a
    repetitive wrist movement; ``uniform`` draws i.i.d. values in
    ``[-amplitude, amplitude]``.
    """
    if kind not in KINDS:
        raise InvalidParameterError(f"unknown kind {kind!r}; choose from {KINDS}")
    if length < 2:
        raise InvalidParameterError(f"length must be at least 2, got {length}")
    if n < 1:
        raise InvalidParameterError(f"n must be at least 1, got {n}")
    if not amplitude > 0 or not rate > 0:
        raise InvalidParameterError("amplitude and rate must be positive")
    rng = np.random.default_rng(seed)
    t = np.arange(length) / rate
    if kind == "constant":
        values = np.tile(rng.uniform(-amplitude, amplitude, n), (length, 1))
    elif kind == "collinear":
        start = rng.uniform(-amplitude, amplitude, n)
        slope = rng.uniform(-amplitude, amplitude, n)
        values = start + np.outer(t, slope)
    elif kind == "random_walk":
        values = np.cumsum(rng.normal(0.0, amplitude, (length, n)), axis=0)
    elif kind == "sinusoid":
        freqs = rng.uniform(0.3, 1.5, (3, n))
        phases = rng.uniform(0, 2 * np.pi, (3, n))
        weights = np.array([1.0, 0.4, 0.15])[:, None]
        values = amplitude * sum(
            w * np.sin(2 * np.pi * f * t[:, None] + p) for w, f, p in zip(weights, freqs, phases)
        )
        values = values + rng.normal(0.0, 0.02 * amplitude, (length, n))
    else:
        values = rng.uniform(-amplitude, amplitude, (length, n))
    header = ["t"] + [f"x{i}" for i in range(n)]
    if n <= 3:
        header = ["t"] + ["x", "y", "z"][:n]
    return StreamFile(t, values, header)
