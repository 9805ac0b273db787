"""Reading, writing and preprocessing of dense matrices.

Matrices are plain ``float64`` numpy arrays.  Labels (probe names, sample
ids, class memberships) travel alongside in :class:`LabeledMatrix`.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import DataError

__all__ = [
    "LabeledMatrix",
    "load_matrix",
    "load_labels",
    "save_matrix",
    "mean_center_rows",
    "min_max_normalize_cols",
    "fill_missing_by_class_mean",
    "DEFAULT_MISSING_MARKERS",
]

DEFAULT_MISSING_MARKERS = ("", "NA")


@dataclass
class LabeledMatrix:
    """A dense matrix with optional row/column names and per-row classes."""

    matrix: np.ndarray
    row_labels: Optional[list] = None
    col_labels: Optional[list] = None
    class_of_row: Optional[list] = None
    source: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=float)
        if self.matrix.ndim != 2:
            raise DataError(f"expected a 2-D matrix, got shape {self.matrix.shape}")
        m, n = self.matrix.shape
        for name, labels, size in (
            ("row_labels", self.row_labels, m),
            ("col_labels", self.col_labels, n),
            ("class_of_row", self.class_of_row, m),
        ):
            if labels is not None and len(labels) != size:
                raise DataError(f"{name} has {len(labels)} entries, expected {size}")

    @property
    def shape(self):
        return self.matrix.shape

    def transpose(self) -> "LabeledMatrix":
        """Swap rows and columns.  Per-row classes cannot survive this."""
        return LabeledMatrix(
            self.matrix.T.copy(),
            row_labels=self.col_labels,
            col_labels=self.row_labels,
            class_of_row=None,
            source=self.source,
        )


def _parse_float(cell: str):
    try:
        value = float(cell)
    except ValueError:
        return None
    return value


def _is_number(cell: str, missing: Sequence[str]) -> bool:
    cell = cell.strip()
    return cell in missing or _parse_float(cell) is not None


def _read_csv(path: Path, allow_missing: bool, missing: Sequence[str]) -> LabeledMatrix:
    with open(path, newline="") as fh:
        rows = [(lineno, row) for lineno, row in enumerate(csv.reader(fh), start=1) if row]
    if not rows:
        raise DataError(f"{path}: empty file")

    header = None
    first_line, first = rows[0]
    if not all(_is_number(c, missing) for c in first):
        header = [c.strip() for c in first]
        rows = rows[1:]
    if not rows:
        raise DataError(f"{path}: header row but no data")

    # a leading label column is present when any data row starts with text
    has_row_labels = any(not _is_number(row[0], missing) for _, row in rows)

    width = len(rows[0][1])
    data = []
    row_labels = [] if has_row_labels else None
    for lineno, row in rows:
        if len(row) != width:
            raise DataError(
                f"{path}:{lineno}: row has {len(row)} fields, expected {width}"
            )
        cells = row
        if has_row_labels:
            row_labels.append(row[0].strip())
            cells = row[1:]
        values = []
        for cell in cells:
            cell = cell.strip()
            if cell in missing:
                if not allow_missing:
                    raise DataError(f"{path}:{lineno}: missing value {cell!r}")
                values.append(math.nan)
                continue
            value = _parse_float(cell)
            if value is None:
                raise DataError(f"{path}:{lineno}: non-numeric cell {cell!r}")
            if not math.isfinite(value):
                raise DataError(f"{path}:{lineno}: non-finite value {cell!r}")
            values.append(value)
        data.append(values)

    col_labels = None
    if header is not None:
        if len(header) != width:
            raise DataError(
                f"{path}:{first_line}: header has {len(header)} fields, expected {width}"
            )
        col_labels = header[1:] if has_row_labels else header

    return LabeledMatrix(
        np.array(data, dtype=float).reshape(len(data), -1),
        row_labels=row_labels,
        col_labels=col_labels,
        source=str(path),
    )


def _read_matrix_market(path: Path) -> LabeledMatrix:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].lower().startswith("%%matrixmarket"):
        raise DataError(f"{path}:1: missing %%MatrixMarket banner")
    banner = lines[0].split()
    if len(banner) != 5:
        raise DataError(f"{path}:1: malformed banner {lines[0]!r}")
    _, obj, layout, fld, symmetry = (t.lower() for t in banner)
    if obj != "matrix" or layout not in ("coordinate", "array"):
        raise DataError(f"{path}:1: unsupported object/format {obj} {layout}")
    if fld not in ("real", "integer", "double"):
        raise DataError(f"{path}:1: only real fields are supported, got {fld}")
    if symmetry not in ("general", "symmetric", "skew-symmetric"):
        raise DataError(f"{path}:1: unsupported symmetry {symmetry}")

    body = [
        (i, ln.split())
        for i, ln in enumerate(lines[1:], start=2)
        if ln.strip() and not ln.lstrip().startswith("%")
    ]
    if not body:
        raise DataError(f"{path}: missing size line")

    def numbers(lineno, tokens, kinds):
        if len(tokens) != len(kinds):
            raise DataError(f"{path}:{lineno}: expected {len(kinds)} fields, got {len(tokens)}")
        out = []
        for tok, kind in zip(tokens, kinds):
            try:
                out.append(kind(tok))
            except ValueError:
                raise DataError(f"{path}:{lineno}: cannot parse {tok!r}") from None
        return out

    size_line, size_tokens = body[0]
    entries = body[1:]
    if layout == "coordinate":
        m, n, nnz = numbers(size_line, size_tokens, (int, int, int))
        if len(entries) != nnz:
            raise DataError(f"{path}: declared {nnz} entries, found {len(entries)}")
        out = np.zeros((m, n))
        for lineno, tokens in entries:
            i, j, v = numbers(lineno, tokens, (int, int, float))
            if not (1 <= i <= m and 1 <= j <= n):
                raise DataError(f"{path}:{lineno}: index ({i}, {j}) out of range")
            if not math.isfinite(v):
                raise DataError(f"{path}:{lineno}: non-finite value")
            out[i - 1, j - 1] += v
            if symmetry != "general" and i != j:
                out[j - 1, i - 1] += v if symmetry == "symmetric" else -v
    else:
        m, n = numbers(size_line, size_tokens, (int, int))
        if symmetry == "general":
            positions = [(i, j) for j in range(n) for i in range(m)]
        else:
            start = 0 if symmetry == "symmetric" else 1
            positions = [(i, j) for j in range(n) for i in range(j + start, m)]
        if len(entries) != len(positions):
            raise DataError(
                f"{path}: expected {len(positions)} array entries, found {len(entries)}"
            )
        out = np.zeros((m, n))
        for (i, j), (lineno, tokens) in zip(positions, entries):
            (v,) = numbers(lineno, tokens, (float,))
            if not math.isfinite(v):
                raise DataError(f"{path}:{lineno}: non-finite value")
            out[i, j] = v
            if symmetry != "general" and i != j:
                out[j, i] = v if symmetry == "symmetric" else -v
    return LabeledMatrix(out, source=str(path))


def load_matrix(
    path,
    format: str = "csv",
    allow_missing: bool = False,
    missing_markers: Sequence[str] = DEFAULT_MISSING_MARKERS,
) -> LabeledMatrix:
    """Load a dense matrix from a CSV or Matrix Market file.

    Parameters
    ----------
    path : str or Path
        File to read.
    format : {"csv", "mtx"}
        ``"matrix-market"`` is accepted as an alias of ``"mtx"``.
    allow_missing : bool
        CSV only.  When True, cells equal to one of ``missing_markers`` are
        read as NaN (see :func:`fill_missing_by_class_mean`); otherwise they
        raise :class:`DataError`.

    A CSV header row is detected when any cell of the first row is not a
    number; a leading label column when any data row starts with text.
    Sparse Matrix Market input is expanded to a dense array.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"{path}: no such file")
    fmt = format.lower()
    if fmt == "csv":
        return _read_csv(path, allow_missing, tuple(missing_markers))
    if fmt in ("mtx", "matrix-market", "mm"):
        return _read_matrix_market(path)
    raise DataError(f"unknown matrix format {format!r}")


def load_labels(path) -> list:
    """Read one label per non-empty line (e.g. class membership of each row)."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"{path}: no such file")
    with open(path) as fh:
        return [ln.strip() for ln in fh if ln.strip()]


def save_matrix(path, m, row_labels=None, col_labels=None) -> None:
    """Write ``m`` as CSV with 17 significant digits (loads back bit-identically)."""
    m = np.asarray(m, dtype=float)
    if m.ndim == 1:
        m = m[:, None]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if col_labels is not None:
            corner = ["label"] if row_labels is not None else []
            writer.writerow(corner + list(col_labels))
        for i, row in enumerate(m):
            cells = [format(v, ".17g") for v in row]
            if row_labels is not None:
                cells = [row_labels[i]] + cells
            writer.writerow(cells)


def mean_center_rows(m) -> np.ndarray:
    """Subtract each row's mean from that row."""
    m = np.asarray(m, dtype=float)
    return m - m.mean(axis=1, keepdims=True)


def min_max_normalize_cols(m) -> np.ndarray:
    """Map each column affinely onto [0, 1]; constant columns become zeros."""
    m = np.asarray(m, dtype=float)
    lo = m.min(axis=0)
    span = m.max(axis=0) - lo
    out = np.zeros_like(m)
    live = span > 0
    out[:, live] = (m[:, live] - lo[live]) / span[live]
    return np.clip(out, 0.0, 1.0)


def fill_missing_by_class_mean(lm: LabeledMatrix, missing=math.nan) -> LabeledMatrix:
    """Replace missing cells by the mean of the same column within the row's class.

    ``missing`` is NaN by default (what :func:`load_matrix` produces with
    ``allow_missing=True``); any other float is matched exactly.
    """
    if lm.class_of_row is None:
        raise DataError("class_of_row is required to fill missing values by class")
    x = lm.matrix.copy()
    if isinstance(missing, float) and math.isnan(missing):
        holes = np.isnan(x)
    else:
        holes = x == missing
    if not holes.any():
        return replace(lm, matrix=x)

    classes = np.asarray(lm.class_of_row, dtype=object)
    for cls in dict.fromkeys(lm.class_of_row):
        rows = classes == cls
        block = x[rows]
        block_holes = holes[rows]
        present = (~block_holes).sum(axis=0)
        needs = block_holes.any(axis=0)
        gaps = np.flatnonzero(needs & (present == 0))
        if gaps.size:
            raise DataError(
                f"class {cls!r} has no observed values in column(s) {gaps.tolist()}"
            )
        sums = np.where(block_holes, 0.0, block).sum(axis=0)
        means = np.divide(sums, present, out=np.zeros_like(sums), where=present > 0)
        block[block_holes] = np.broadcast_to(means, block.shape)[block_holes]
        x[rows] = block
    return replace(lm, matrix=x)
