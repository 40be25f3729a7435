import itertools

import numpy as np
import pytest

from pfgroups.finite import FiniteGroup


def perm_group(perms):
    """Table of a permutation group from an explicit element list.

    Composition is "apply p, then q", matching the convention used for the
    free-group actions in the lattice enumeration.
    """
    perms = [tuple(p) for p in perms]
    index = {p: i for i, p in enumerate(perms)}
    n = len(perms)
    table = np.empty((n, n), dtype=np.int64)
    for i, p in enumerate(perms):
        for j, q in enumerate(perms):
            table[i, j] = index[tuple(q[p[k]] for k in range(len(p)))]
    ident = index[tuple(range(len(perms[0])))]
    return FiniteGroup(table, identity=ident, labels=perms)


@pytest.fixture(scope="session")
def s3():
    return perm_group(sorted(itertools.permutations(range(3))))


@pytest.fixture(scope="session")
def s4():
    return perm_group(sorted(itertools.permutations(range(4))))


def matmul(a, b, q):
    n = len(a)
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(n)) % q for j in range(n))
                 for i in range(n))


# acceptance criteria report one line each; printed after the run
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
