import numpy as np
import pytest

from mossgwas import Dataset

ACCEPTANCE_LINES = []


@pytest.fixture
def record_criterion():
    """Collect one PASS/FAIL line per acceptance criterion."""
    def record(name, ok, detail=""):
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_dataset(rng, n=20, dimens=(3, 2, 3), response_rate=None):
    """Random categorical dataset with a binary response appended."""
    cols = [rng.integers(0, d, size=n) for d in dimens]
    y = rng.integers(0, 2, size=n)
    names = tuple(f"x{j}" for j in range(len(dimens))) + ("y",)
    return Dataset(names, tuple(dimens) + (2,), np.column_stack(cols + [y]))
