import itertools

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def all_binary(m, n):
    """Every m x n 0/1 matrix."""
    for bits in itertools.product((0, 1), repeat=m * n):
        yield np.array(bits, dtype=np.int8).reshape(m, n)


def exhaustive_bmf(A, r):
    """min over all binary U, V of ||A - U V^T||^2, by plain enumeration."""
    m, n = A.shape
    best = None
    for U in all_binary(m, r):
        for V in all_binary(n, r):
            err = 0
            for i in range(m):
                for j in range(n):
                    s = sum(int(U[i, k]) * int(V[j, k]) for k in range(r))
                    err += (int(A[i, j]) - s) ** 2
            best = err if best is None else min(best, err)
    return best


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.LINES):
            terminalreporter.write_line(line)
