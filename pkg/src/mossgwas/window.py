"""Moving-window regression scan and binary recoding of three-category SNPs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from .core import Dataset
from .evidence import PriorConfig, log_marglik_regression

# Binary merges of a three-category column, as old code -> new code. The
# merged category gets code 1 when it contains the original high code.
MERGES = (
    ("{0,1}|{2}", (0, 0, 1)),
    ("{0}|{1,2}", (0, 1, 1)),
    ("{0,2}|{1}", (1, 0, 1)),
)


@dataclass(frozen=True)
class WindowRow:
    formula: str
    snps: Tuple[str, ...]
    start: int
    logMargLik: float


def moving_window(data: Dataset, prior: PriorConfig = PriorConfig(), window_size: int = 2) -> List[WindowRow]:
    """
    Evidence of the regression of the response on each run of
    ``window_size`` consecutive predictor columns, best first.

    Windows follow raw column order. Ties are ordered by window start.
    """
    p = len(data.predictors)
    if not 1 <= window_size <= p:
        raise ValueError(f"window size must be between 1 and {p}, got {window_size}")
    y = data.response_index
    rows = []
    for start in range(p - window_size + 1):
        cols = tuple(range(start, start + window_size))
        snps = tuple(data.names[v] for v in cols)
        formula = "[{} | {}]".format(data.names[y], ", ".join(snps))
        rows.append(WindowRow(formula, snps, start, log_marglik_regression(data, y, cols, prior)))
    rows.sort(key=lambda r: (-r.logMargLik, r.start))
    return rows


@dataclass(frozen=True)
class RecodeResult:
    data: Dataset
    codings: Dict[str, str]                     # column -> chosen coding name
    code_maps: Dict[str, Tuple[int, ...]]       # column -> old code -> new code
    evidence: Dict[str, Dict[str, float]]       # column -> coding -> log evidence

    @property
    def dimens(self) -> Tuple[int, ...]:
        return self.data.dimens


def coding_evidence(data: Dataset, column: int, prior: PriorConfig = PriorConfig()) -> Dict[str, float]:
    """Single-predictor evidence of a three-category column under each coding."""
    y = data.response
    x = data.rows[:, column]
    out = {"original": _single_evidence(x, 3, y, prior)}
    for name, mapping in MERGES:
        out[name] = _single_evidence(np.asarray(mapping)[x], 2, y, prior)
    return out


def _single_evidence(x, dim, y, prior):
    tmp = Dataset(("x", "y"), (dim, 2), np.column_stack([x, y]))
    return log_marglik_regression(tmp, 1, [0], prior)


def recode_data(data: Dataset, prior: PriorConfig = PriorConfig()) -> RecodeResult:
    """
    Replace each three-category predictor by its best-scoring coding.

    The original coding wins ties, then the lowest-numbered merge. Columns
    of any other dimension pass through unchanged; column order is kept.
    """
    rows = np.array(data.rows)
    dimens = list(data.dimens)
    codings, maps, evid = {}, {}, {}
    for j in data.predictors:
        if data.dimens[j] != 3:
            continue
        name = data.names[j]
        ev = coding_evidence(data, j, prior)
        evid[name] = ev
        best = "original"
        for merge_name, _ in MERGES:
            if ev[merge_name] > ev[best]:
                best = merge_name
        codings[name] = best
        if best == "original":
            maps[name] = (0, 1, 2)
        else:
            mapping = dict(MERGES)[best]
            maps[name] = mapping
            rows[:, j] = np.asarray(mapping)[rows[:, j]]
            dimens[j] = 2
    recoded = Dataset(data.names, tuple(dimens), rows, data.n_dropped, data.label_maps)
    return RecodeResult(recoded, codings, maps, evid)
