import itertools
import math

import numpy as np
import pytest

from simsmooth.operators import DensityOperator


def brute_partial_trace(matrix, dims, keep):
    """Reference partial trace by explicit index loops."""
    keep = sorted(keep)
    drop = [i for i in range(len(dims)) if i not in keep]
    kd = [dims[i] for i in keep]
    side = math.prod(kd)
    out = np.zeros((side, side), dtype=complex)

    def flat(idx, shape):
        f = 0
        for i, d in zip(idx, shape):
            f = f * d + i
        return f

    for kr in itertools.product(*[range(d) for d in kd]):
        for kc in itertools.product(*[range(d) for d in kd]):
            acc = 0
            for dr in itertools.product(*[range(dims[i]) for i in drop]):
                row = [0] * len(dims)
                col = [0] * len(dims)
                for pos, i in enumerate(keep):
                    row[i], col[i] = kr[pos], kc[pos]
                for pos, i in enumerate(drop):
                    row[i] = col[i] = dr[pos]
                acc += matrix[flat(row, dims), flat(col, dims)]
            out[flat(kr, kd), flat(kc, kd)] = acc
    return out


def diag_state(values, dims=None):
    values = np.asarray(values, dtype=float)
    return DensityOperator(dims or (values.size,), np.diag(values).astype(complex))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
