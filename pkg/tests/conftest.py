"""Shared test helpers: random decompositions, a prefix-sum submatrix
classifier used as an independent oracle, and seeded corpora."""

import random

import numpy as np
import pytest

from twinmat.matrix import BinaryMatrix, Rect, RectangleDecomposition, SubmatrixType


def random_decomposition(n, rng, tries=None, max_side=None):
    """Pack random pairwise-disjoint rectangles by rejection sampling."""
    tries = tries if tries is not None else 4 * n
    max_side = max_side if max_side is not None else max(1, n // 3)
    rects = []
    for _ in range(tries):
        r1 = rng.randint(1, n)
        r2 = rng.randint(r1, min(n, r1 + max_side))
        c1 = rng.randint(1, n)
        c2 = rng.randint(c1, min(n, c1 + max_side))
        cand = Rect(r1, r2, c1, c2)
        if all(not cand.intersects(r) for r in rects):
            rects.append(cand)
    return RectangleDecomposition(n, tuple(rects))


def random_matrix(n, rng, p=0.5):
    a = np.array(
        [[1 if rng.random() < p else 0 for _ in range(n)] for _ in range(n)],
        dtype=np.uint8,
    )
    return BinaryMatrix(a)


class FastClassifier:
    """O(1)-per-query submatrix classifier via 2D prefix sums over the
    row-adjacent and column-adjacent difference grids. Independent of both
    the naive scan and the geometric oracle."""

    def __init__(self, m: BinaryMatrix):
        a = m.a
        n = m.n
        rd = np.zeros((n, n + 1), dtype=np.int64)
        if n > 1:
            rd[1:n, 1:] = np.cumsum((a[:-1, :] != a[1:, :]).astype(np.int64), axis=1)
        self._rd = np.cumsum(rd, axis=0).tolist()
        cd = np.zeros((n + 1, n), dtype=np.int64)
        if n > 1:
            cd[1:, 1 : n] = np.cumsum((a[:, :-1] != a[:, 1:]).astype(np.int64), axis=0)
        self._cd = np.cumsum(cd, axis=1).tolist()
        self._a = a.tolist()

    def classify(self, r1, r2, c1, c2) -> SubmatrixType:
        rd = self._rd
        # row diffs over diff-rows [r1-1, r2-1) (0-based), cols [c1-1, c2)
        rows_equal = (
            rd[r2 - 1][c2] - rd[r1 - 1][c2] - rd[r2 - 1][c1 - 1] + rd[r1 - 1][c1 - 1]
            == 0
        )
        cd = self._cd
        cols_equal = (
            cd[r2][c2 - 1] - cd[r1 - 1][c2 - 1] - cd[r2][c1 - 1] + cd[r1 - 1][c1 - 1]
            == 0
        )
        if rows_equal and cols_equal:
            if self._a[r1 - 1][c1 - 1]:
                return SubmatrixType.CONSTANT1
            return SubmatrixType.CONSTANT0
        if rows_equal:
            return SubmatrixType.VERTICAL
        if cols_equal:
            return SubmatrixType.HORIZONTAL
        return SubmatrixType.MIXED


@pytest.fixture(scope="session")
def rng():
    return random.Random(20240901)
