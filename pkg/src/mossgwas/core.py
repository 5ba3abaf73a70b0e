"""
Datasets of category codes and the contingency tables built from them.

A dataset is an ``n x (p + 1)`` integer matrix whose last column is the
binary response. Cells of a contingency table are stored flat, using a
mixed-radix encoding in which the *first* variable varies fastest.
"""

from __future__ import annotations

import csv
import logging
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

MISSING_TOKENS = frozenset({"NA", ""})


class DataError(ValueError):
    """Raised for malformed or out-of-range input data."""


@dataclass(frozen=True)
class Dataset:
    """
    Categorical dataset with the binary response in the last column.

    Parameters
    ----------
    names : tuple of str
        Column identifiers, response last.
    dimens : tuple of int
        Number of categories for each column.
    rows : ndarray of shape (n, p + 1)
        Category codes, ``0 <= rows[:, j] < dimens[j]``.
    n_dropped : int
        Rows removed at load time because they held a missing value.
    label_maps : dict
        For label-coded columns, the original label of each code.
    """

    names: Tuple[str, ...]
    dimens: Tuple[int, ...]
    rows: np.ndarray
    n_dropped: int = 0
    label_maps: Dict[str, List[str]] = field(default_factory=dict)

    def __post_init__(self):
        rows = np.ascontiguousarray(self.rows, dtype=np.int64)
        if rows.ndim != 2:
            raise DataError("rows must be a 2-d array")
        names = tuple(str(s) for s in self.names)
        dimens = tuple(int(d) for d in self.dimens)
        if len(names) != rows.shape[1] or len(dimens) != rows.shape[1]:
            raise DataError(
                f"{rows.shape[1]} columns but {len(names)} names and {len(dimens)} dimens"
            )
        if len(set(names)) != len(names):
            raise DataError("duplicate column names")
        if any(d < 1 for d in dimens):
            raise DataError("every dimension must be positive")
        if dimens[-1] != 2:
            raise DataError("response column must be binary (dimension 2)")
        if rows.size:
            if rows.min() < 0:
                raise DataError("negative category code")
            over = rows.max(axis=0) >= np.asarray(dimens)
            if over.any():
                j = int(np.flatnonzero(over)[0])
                raise DataError(
                    f"column {names[j]!r} has code {rows[:, j].max()} "
                    f">= declared dimension {dimens[j]}"
                )
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "dimens", dimens)

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def n_columns(self) -> int:
        return self.rows.shape[1]

    @property
    def response_index(self) -> int:
        return self.n_columns - 1

    @property
    def predictors(self) -> List[int]:
        """Indices of all non-response columns."""
        return list(range(self.n_columns - 1))

    @property
    def response(self) -> np.ndarray:
        return self.rows[:, -1]

    def column_index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise DataError(f"unknown column {name!r}") from None

    def subset_rows(self, idx) -> "Dataset":
        """Dataset restricted to the given row indices (dimensions kept)."""
        return Dataset(self.names, self.dimens, self.rows[idx], 0, self.label_maps)

    def with_response(self, y) -> "Dataset":
        rows = np.array(self.rows)
        rows[:, -1] = y
        return Dataset(self.names, self.dimens, rows, self.n_dropped, self.label_maps)


@dataclass(frozen=True)
class ContingencyTable:
    """
    Dense cell counts over an ordered subset of columns.

    ``counts[i]`` is the count of the cell whose codes ``(x_0, x_1, ...)``
    satisfy ``i = x_0 + d_0 * (x_1 + d_1 * (x_2 + ...))``.
    """

    variables: Tuple[int, ...]
    dimens: Tuple[int, ...]
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts)
        if counts.shape != (int(np.prod(self.dimens, dtype=np.int64)),):
            raise ValueError("counts length must equal the product of dimens")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "variables", tuple(int(v) for v in self.variables))
        object.__setattr__(self, "dimens", tuple(int(d) for d in self.dimens))

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def n_cells(self) -> int:
        return self.counts.shape[0]

    def as_array(self) -> np.ndarray:
        """Counts reshaped so that axis ``i`` is ``variables[i]``."""
        return self.counts.reshape(self.dimens, order="F")

    def marginal(self, variables: Sequence[int]) -> "ContingencyTable":
        """Collapse onto a subset of this table's variables (in the given order)."""
        variables = tuple(int(v) for v in variables)
        axes = [self.variables.index(v) for v in variables]
        drop = tuple(i for i in range(len(self.variables)) if i not in axes)
        arr = self.as_array().sum(axis=drop)
        # remaining axes are in increasing original order; reorder to `variables`
        kept = sorted(axes)
        arr = np.transpose(arr, [kept.index(a) for a in axes])
        dimens = tuple(self.dimens[a] for a in axes)
        return ContingencyTable(variables, dimens, arr.reshape(-1, order="F"))


def cell_codes(dimens: Sequence[int]) -> np.ndarray:
    """All cells of a table as a ``(n_cells, len(dimens))`` code matrix."""
    dimens = list(dimens)
    n_cells = int(np.prod(dimens, dtype=np.int64))
    idx = np.arange(n_cells)
    out = np.empty((n_cells, len(dimens)), dtype=np.int64)
    for j, d in enumerate(dimens):
        out[:, j] = idx % d
        idx = idx // d
    return out


def encode_cells(codes: np.ndarray, dimens: Sequence[int]) -> np.ndarray:
    """Mixed-radix cell index of each row of ``codes`` (first column fastest)."""
    codes = np.asarray(codes, dtype=np.int64)
    index = np.zeros(codes.shape[0], dtype=np.int64)
    stride = 1
    for j, d in enumerate(dimens):
        index += codes[:, j] * stride
        stride *= int(d)
    return index


def contingency_table(data: Dataset, variables: Sequence[int]) -> ContingencyTable:
    """Tally the rows of ``data`` over the given columns."""
    variables = [int(v) for v in variables]
    if not variables:
        raise ValueError("contingency_table needs at least one variable")
    if len(set(variables)) != len(variables):
        raise ValueError(f"duplicate variables in {variables}")
    for v in variables:
        if not 0 <= v < data.n_columns:
            raise ValueError(f"variable index {v} out of range")
    dimens = [data.dimens[v] for v in variables]
    n_cells = int(np.prod(dimens, dtype=np.int64))
    index = encode_cells(data.rows[:, variables], dimens)
    counts = np.bincount(index, minlength=n_cells)
    return ContingencyTable(tuple(variables), tuple(dimens), counts)


# ---------------------------------------------------------------------------
# File input / output
# ---------------------------------------------------------------------------


def _detect_delimiter(header: str) -> str:
    if header.count("\t") > 0 and header.count("\t") >= header.count(","):
        return "\t"
    if "," in header:
        return ","
    try:
        return csv.Sniffer().sniff(header).delimiter
    except csv.Error:
        return ","


def read_dimens_file(path: str) -> List[int]:
    """Read a sidecar dimension file (one integer per line)."""
    with open(path) as fh:
        return [int(line) for line in fh.read().split()]


def load_dataset(path: str, dimens=None, labels: bool = False) -> Dataset:
    """
    Load a delimited table with a header row; the last column is the response.

    Rows containing a missing value (``NA`` or an empty field) are dropped.
    When ``dimens`` is ``None`` (or ``"auto"``) each column's dimension is
    one plus its largest observed code. ``dimens`` may also be the path of
    a sidecar file. With ``labels=True`` arbitrary string labels are mapped
    to codes in order of first appearance; otherwise every non-missing
    cell must be a non-negative integer.
    """
    with open(path, newline="") as fh:
        header = fh.readline()
        if not header.strip():
            raise DataError(f"{path}: empty file")
        delimiter = _detect_delimiter(header)
        names = next(csv.reader([header.rstrip("\r\n")], delimiter=delimiter))
        names = [s.strip() for s in names]
        raw = [r for r in csv.reader(fh, delimiter=delimiter) if r]

    if not raw:
        raise DataError(f"{path}: no data rows")
    p1 = len(names)
    kept = []
    for lineno, r in enumerate(raw, start=2):
        if len(r) != p1:
            raise DataError(f"{path}:{lineno}: expected {p1} fields, got {len(r)}")
        r = [s.strip() for s in r]
        if any(s in MISSING_TOKENS for s in r):
            continue
        kept.append(r)
    n_dropped = len(raw) - len(kept)
    if n_dropped:
        logger.info("%s: dropped %d row(s) with missing values", path, n_dropped)

    label_maps: Dict[str, List[str]] = {}
    rows = np.zeros((len(kept), p1), dtype=np.int64)
    for j in range(p1):
        col = [r[j] for r in kept]
        if labels:
            seen: Dict[str, int] = {}
            for s in col:
                seen.setdefault(s, len(seen))
            if not all(s.isdigit() for s in seen):
                label_maps[names[j]] = list(seen)
                rows[:, j] = [seen[s] for s in col]
                continue
        try:
            rows[:, j] = [int(s) for s in col]
        except ValueError:
            bad = next(s for s in col if not _is_int(s))
            raise DataError(f"{path}: non-integer cell {bad!r} in column {names[j]!r}") from None

    if isinstance(dimens, str) and dimens != "auto":
        dimens = read_dimens_file(dimens)
    if dimens is None or (isinstance(dimens, str) and dimens == "auto"):
        maxes = rows.max(axis=0) if len(kept) else np.zeros(p1, dtype=np.int64)
        dimens = [int(m) + 1 for m in maxes]
        if dimens[-1] > 2:
            raise DataError("response column must be binary (codes 0/1)")
        dimens[-1] = 2
    dimens = list(dimens)
    if len(dimens) != p1:
        raise DataError(f"{len(dimens)} dimensions given for {p1} columns")
    return Dataset(tuple(names), tuple(dimens), rows, n_dropped, label_maps)


def _is_int(s: str) -> bool:
    try:
        int(s)
        return True
    except ValueError:
        return False


def write_dataset(data: Dataset, path: str, dimens_path: Optional[str] = None) -> None:
    """Write ``data`` as CSV, optionally with a dimension sidecar file."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(data.names)
        w.writerows(data.rows.tolist())
    if dimens_path is not None:
        with open(dimens_path, "w") as fh:
            fh.write("".join(f"{d}\n" for d in data.dimens))


def default_dimens_path(path: str) -> str:
    root, _ = os.path.splitext(path)
    return root + ".dimens"
