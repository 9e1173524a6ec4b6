"""Claims development triangles, premium vectors and their CSV formats.

Accident years are numbered ``1..I`` and development periods ``0..J`` with
``I = J + 1``.  Internally a triangle is an ``(I, J+1)`` float array whose
row ``r`` holds accident year ``r + 1``; unobserved cells (``i + j > I``)
are NaN.

Triangle CSV::

    accident_year,dev_0,dev_1,...,dev_J
    1,5946975,9668212,...
    2,6346756,...,          <- trailing cells empty

Premium CSV::

    accident_year,premium
    1,15473558
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO

import numpy as np

from .errors import ParseError, ShapeError, ValidationError


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float, copy=True)
    arr.flags.writeable = False
    return arr


def observed_mask(n_years: int) -> np.ndarray:
    """Boolean ``(I, I)`` mask of the upper-left triangle ``i + j <= I``."""
    rows = np.arange(n_years)[:, None]
    cols = np.arange(n_years)[None, :]
    return rows + cols <= n_years - 1


@dataclass(frozen=True, eq=False)
class ClaimsTriangle:
    """Cumulative claims ``C_{i,j}`` observed on ``i + j <= I``.

    Parameters
    ----------
    values : array_like, shape (I, J+1)
        Cumulative claims; cells below the anti-diagonal must be NaN.
    origins : sequence of int, optional
        Accident-year labels used for CSV output. Defaults to ``1..I``.
    """

    values: np.ndarray
    origins: tuple = field(default=())

    def __post_init__(self):
        arr = _frozen(self.values)
        if arr.ndim != 2:
            raise ShapeError(f"triangle must be 2-dimensional, got ndim={arr.ndim}")
        n_rows, n_cols = arr.shape
        if n_rows != n_cols:
            raise ShapeError(
                f"expected I = J + 1, got I={n_rows} accident years and J={n_cols - 1}"
            )
        if n_rows < 2:
            raise ShapeError("triangle needs J >= 1 (at least two accident years)")
        mask = observed_mask(n_rows)
        if np.any(~np.isnan(arr[~mask])):
            r, c = np.argwhere(~np.isnan(arr) & ~mask)[0]
            raise ShapeError(f"cell (i={r + 1}, j={c}) lies outside the observed triangle")
        observed = arr[mask]
        if np.any(np.isnan(observed)):
            r, c = np.argwhere(np.isnan(arr) & mask)[0]
            raise ShapeError(f"missing observed cell (i={r + 1}, j={c})")
        bad = mask & ~(arr > 0)
        if np.any(bad):
            r, c = np.argwhere(bad)[0]
            raise ValidationError(
                f"cell (i={r + 1}, j={c}) = {arr[r, c]!r} is not strictly positive"
            )
        if not np.all(np.isfinite(observed)):
            raise ValidationError("observed cells must be finite")
        origins = tuple(int(o) for o in self.origins) or tuple(range(1, n_rows + 1))
        if len(origins) != n_rows:
            raise ShapeError(f"{len(origins)} origin labels for {n_rows} accident years")
        if any(b <= a for a, b in zip(origins, origins[1:])):
            raise ShapeError("accident years must be strictly increasing")
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "origins", origins)

    @property
    def I(self) -> int:  # noqa: E743
        return self.values.shape[0]

    @property
    def J(self) -> int:
        return self.values.shape[1] - 1

    @property
    def n_cells(self) -> int:
        return self.I * (self.I + 1) // 2

    def cell(self, i: int, j: int) -> float:
        """``C_{i,j}`` with 1-based accident year ``i``."""
        if not (1 <= i <= self.I and 0 <= j <= self.J) or i + j > self.I:
            raise IndexError(f"(i={i}, j={j}) is not an observed cell")
        return float(self.values[i - 1, j])

    @property
    def diagonal_dev(self) -> np.ndarray:
        """Development index ``I - i`` of each accident year's latest cell."""
        return self.J - np.arange(self.I)

    def scaled(self, c: float) -> "ClaimsTriangle":
        return ClaimsTriangle(self.values * c, self.origins)

    def __eq__(self, other):
        if not isinstance(other, ClaimsTriangle):
            return NotImplemented
        return self.origins == other.origins and np.array_equal(
            self.values, other.values, equal_nan=True
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class IncrementalTriangle:
    """Increments ``Y_{i,0} = C_{i,0}``, ``Y_{i,j} = C_{i,j} - C_{i,j-1}``.

    Increments may be negative; no positivity check is made.
    """

    values: np.ndarray
    origins: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))
        object.__setattr__(self, "origins", tuple(self.origins))

    def cumulate(self) -> ClaimsTriangle:
        return ClaimsTriangle(np.cumsum(self.values, axis=1), self.origins)


@dataclass(frozen=True, eq=False)
class PremiumVector:
    """Strictly positive premiums (exposures) ``pi_i``, one per accident year."""

    values: np.ndarray
    origins: tuple = field(default=())

    def __post_init__(self):
        arr = _frozen(self.values)
        if arr.ndim != 1 or arr.size == 0:
            raise ShapeError("premiums must be a non-empty 1-d vector")
        bad = ~(np.isfinite(arr) & (arr > 0))
        if np.any(bad):
            k = int(np.argmax(bad))
            raise ValidationError(f"premium of accident year {k + 1} = {arr[k]!r} is not strictly positive")
        origins = tuple(int(o) for o in self.origins) or tuple(range(1, arr.size + 1))
        if len(origins) != arr.size:
            raise ShapeError(f"{len(origins)} origin labels for {arr.size} premiums")
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "origins", origins)

    def __len__(self):
        return self.values.size

    def __eq__(self, other):
        if not isinstance(other, PremiumVector):
            return NotImplemented
        return self.origins == other.origins and np.array_equal(self.values, other.values)

    __hash__ = None


def to_incremental(tri: ClaimsTriangle) -> IncrementalTriangle:
    inc = np.array(tri.values)
    inc[:, 1:] = tri.values[:, 1:] - tri.values[:, :-1]
    return IncrementalTriangle(inc, tri.origins)


def latest_diagonal(tri: ClaimsTriangle) -> np.ndarray:
    """Latest observed cells ``C_{i, I-i}`` for ``i = 1..I``."""
    rows = np.arange(tri.I)
    return tri.values[rows, tri.diagonal_dev]


def as_premiums(pi, tri: ClaimsTriangle) -> PremiumVector:
    """Accept a ``PremiumVector`` or a plain sequence aligned with ``tri``."""
    if isinstance(pi, PremiumVector):
        return pi
    return PremiumVector(np.asarray(pi, dtype=float), tri.origins)


def check_alignment(tri: ClaimsTriangle, pi: PremiumVector) -> None:
    if len(pi) != tri.I:
        raise ShapeError(f"{len(pi)} premiums for {tri.I} accident years")
    if pi.origins != tri.origins:
        raise ShapeError("premium accident years do not match the triangle's")


# ---------------------------------------------------------------- CSV I/O


def _number(token: str, row: int, column: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"non-numeric cell {token!r}", row, column) from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite cell {token!r}", row, column)
    return value


def _year(token: str, row: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"accident year {token!r} is not an integer", row, 1) from None


def _read_rows(source) -> list[list[str]]:
    if isinstance(source, str):
        source = io.StringIO(source)
    rows = [[tok.strip() for tok in r] for r in csv.reader(source)]
    return [r for r in rows if any(r)]


def parse_triangle(source: str | TextIO) -> ClaimsTriangle:
    """Parse a triangle CSV (text or open file) into a validated triangle.

    Raises
    ------
    ParseError
        Bad header, non-numeric cell, or a gap inside a row.
    ShapeError
        Ragged or non-triangular layout, or ``J < 1``.
    ValidationError
        A non-positive observed cell.
    """
    rows = _read_rows(source)
    if not rows:
        raise ParseError("empty triangle file", 1)
    header = rows[0]
    if header[0] != "accident_year" or len(header) < 2:
        raise ParseError("header must start with 'accident_year,dev_0'", 1)
    for col, name in enumerate(header[1:]):
        if name != f"dev_{col}":
            raise ParseError(f"expected header 'dev_{col}', got {name!r}", 1, col + 2)
    n_dev = len(header) - 1
    body = rows[1:]
    if n_dev < 2 or len(body) < 2:
        raise ShapeError(
            f"triangle with {len(body)} accident year(s) and J={n_dev - 1}: need J >= 1"
        )
    if len(body) != n_dev:
        raise ShapeError(f"expected I = J + 1 = {n_dev} rows, got {len(body)}")

    values = np.full((n_dev, n_dev), np.nan)
    origins = []
    for r, line in enumerate(body):
        line_no = r + 2
        if len(line) > n_dev + 1:
            raise ParseError(f"{len(line)} fields, header has {n_dev + 1}", line_no)
        origins.append(_year(line[0], line_no))
        cells = line[1:] + [""] * (n_dev + 1 - len(line))
        filled = [k for k, tok in enumerate(cells) if tok != ""]
        expected = n_dev - r
        if filled != list(range(len(filled))):
            gap = next(k for k in range(len(filled)) if k not in filled)
            raise ParseError("empty cell inside a row", line_no, gap + 2)
        if len(filled) != expected:
            raise ShapeError(
                f"accident year on line {line_no} has {len(filled)} observed cells, expected {expected}"
            )
        for k in filled:
            values[r, k] = _number(cells[k], line_no, k + 2)
    return ClaimsTriangle(values, tuple(origins))


def parse_premiums(source: str | TextIO) -> PremiumVector:
    rows = _read_rows(source)
    if not rows or rows[0][:2] != ["accident_year", "premium"] or len(rows[0]) != 2:
        raise ParseError("header must be 'accident_year,premium'", 1)
    origins, values = [], []
    for r, line in enumerate(rows[1:]):
        line_no = r + 2
        if len(line) != 2:
            raise ParseError(f"expected 2 fields, got {len(line)}", line_no)
        origins.append(_year(line[0], line_no))
        values.append(_number(line[1], line_no, 2))
    if not values:
        raise ShapeError("premium file has no rows")
    return PremiumVector(np.array(values), tuple(origins))


def format_number(x: float) -> str:
    """Shortest exact text for a float; integral values without ``.0``."""
    if float(x).is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def serialize_triangle(tri: ClaimsTriangle) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["accident_year"] + [f"dev_{j}" for j in range(tri.J + 1)])
    for r, origin in enumerate(tri.origins):
        row = [format_number(v) if not np.isnan(v) else "" for v in tri.values[r]]
        w.writerow([origin] + row)
    return buf.getvalue()


def serialize_premiums(pi: PremiumVector) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["accident_year", "premium"])
    for origin, v in zip(pi.origins, pi.values):
        w.writerow([origin, format_number(v)])
    return buf.getvalue()


def triangle_from_rows(rows: Iterable[Sequence[float]], origins=()) -> ClaimsTriangle:
    """Build a triangle from ragged rows of observed cells (row ``k`` has ``I - k`` entries)."""
    rows = [list(r) for r in rows]
    n = len(rows)
    values = np.full((n, n), np.nan)
    for r, cells in enumerate(rows):
        if len(cells) != n - r:
            raise ShapeError(f"row {r + 1} has {len(cells)} cells, expected {n - r}")
        values[r, : len(cells)] = cells
    return ClaimsTriangle(values, origins)


def read_triangle(path) -> ClaimsTriangle:
    with open(path, newline="") as fh:
        return parse_triangle(fh)


def read_premiums(path) -> PremiumVector:
    with open(path, newline="") as fh:
        return parse_premiums(fh)
