import itertools

import numpy as np
import pytest

import glsg.spectral

from glsg.census import enumerate_labeled
from glsg.semigroup import (
    make_brandt,
    make_constant_image,
    make_cyclic_group,
    make_left_zero,
    make_null,
    make_rectangular_band,
    make_right_zero,
)


def naive_associativity_witness(rows):
    """First failing (i, j, k) in row-major order, by plain triple loop."""
    n = len(rows)
    for i, j, k in itertools.product(range(1, n + 1), repeat=3):
        left = rows[rows[i - 1][j - 1] - 1][k - 1]
        right = rows[i - 1][rows[j - 1][k - 1] - 1]
        if left != right:
            return i, j, k
    return None


def family_corpus(max_order=12):
    """Family instances with order <= max_order."""
    out = []
    for n in range(1, max_order + 1):
        out += [make_null(n), make_left_zero(n), make_right_zero(n), make_cyclic_group(n)]
        out += [make_constant_image(n, c) for c in range(1, n + 1)]
    for p in range(1, max_order + 1):
        for q in range(1, max_order // p + 1):
            out.append(make_rectangular_band(p, q))
    for m in range(1, 4):
        for idx in range(1, 3):
            if 1 + m * idx * idx <= max_order:
                out.append(make_brandt(make_cyclic_group(m), idx))
    return out


@pytest.fixture(scope="session")
def labeled_small():
    """All labeled semigroups of orders 1..4."""
    tables = {}
    for n in range(1, 5):
        found = []
        enumerate_labeled(n, found.append)
        tables[n] = found
    return tables


S1 = [[1, 1], [1, 2]]


class MomentLog:
    """Every eigen-solve in the session, checked against trace(A) and trace(A^2)."""

    def __init__(self):
        self.checked = 0
        self.failures = []

    def check(self, matrix, values):
        a = np.asarray(matrix, dtype=np.float64)
        values = np.asarray(values)
        trace, frob = float(np.trace(a)), float((a * a).sum())
        scale = max(1.0, frob)
        ok = abs(values.sum() - trace) <= 1e-6 * scale and abs((values**2).sum() - frob) <= 1e-6 * scale
        self.checked += 1
        if not ok:
            self.failures.append(a.shape)
        return ok


MOMENTS = MomentLog()
_solver = glsg.spectral.eigenvalues_symmetric


def _checked_solver(matrix, *args, **kwargs):
    values = _solver(matrix, *args, **kwargs)
    assert MOMENTS.check(matrix, values), "trace or second moment violated"
    return values


# patched at import so that every spectrum computed by any test is checked
glsg.spectral.eigenvalues_symmetric = _checked_solver


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
        terminalreporter.write_line(
            f"eigen-solves checked for trace and second moment: {MOMENTS.checked}, "
            f"failures: {len(MOMENTS.failures)}"
        )
