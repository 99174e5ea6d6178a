from __future__ import annotations

import itertools
from fractions import Fraction

from hypothesis import settings

from finmetric.core import FinSpace, find_isometry
from finmetric.values import INF, to_value

settings.register_profile("repo", derandomize=True, deadline=None, max_examples=150)
settings.load_profile("repo")


def sp(points, rows) -> FinSpace:
    """Build a space from short literals: ints, "p/q" strings or "inf"."""
    return FinSpace(list(points), [[to_value(v) for v in row] for row in rows])


def line(*xs) -> FinSpace:
    """Points of the real line with labels equal to their coordinates."""
    vals = [Fraction(x) for x in xs]
    return FinSpace([str(x) for x in xs], [[abs(a - b) for b in vals] for a in vals])


def isometric(X: FinSpace, Y: FinSpace) -> bool:
    return find_isometry(X, Y) is not None


def is_pseudometric_matrix(d) -> bool:
    """Independent restatement of the axioms, used as an oracle."""
    n = len(d)
    for i, j in itertools.product(range(n), repeat=2):
        if d[i][j] != d[j][i] or (i == j and d[i][j] != 0):
            return False
    for i, j, k in itertools.product(range(n), repeat=3):
        lhs = d[i][k]
        rhs = INF if INF in (d[i][j], d[j][k]) else d[i][j] + d[j][k]
        if lhs is not INF and rhs is not INF and lhs > rhs:
            return False
        if lhs is INF and rhs is not INF:
            return False
    return True
