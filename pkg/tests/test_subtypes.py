import itertools
import random

import pytest

from twinmat.errors import BoundsError
from twinmat.matrix import (
    Rect,
    RectangleDecomposition,
    SubmatrixType,
    classify,
    corners,
    realize,
)
from twinmat.subtypes import (
    AreaBoundary,
    TypesOracle,
    build_types_oracle,
    corner_points_by_probes,
    entry,
    query_type,
)

from conftest import FastClassifier, random_decomposition


def dec(n, *rects):
    return RectangleDecomposition(n, tuple(Rect(*r) for r in rects))


class TestBuild:
    def test_empty_dec(self):
        o = build_types_oracle(dec(4))
        assert o.boundary.corner_points == ()
        for z in (Rect(1, 4, 1, 4), Rect(2, 3, 1, 2), Rect(1, 1, 1, 1)):
            assert query_type(o, z) is SubmatrixType.CONSTANT0

    def test_full_rect(self):
        o = build_types_oracle(dec(4, (1, 4, 1, 4)))
        assert o.boundary.corner_points == ()
        for z in (Rect(1, 4, 1, 4), Rect(2, 3, 1, 2)):
            assert query_type(o, z) is SubmatrixType.CONSTANT1

    def test_corner_set_simple(self):
        o = build_types_oracle(dec(2, (1, 1, 2, 2), (2, 2, 1, 2)))
        assert realize(o.dec).to_literal() == "01;11"
        assert o.boundary.corner_points == ((1, 1),)

    def test_corner_set_matches_matrix_corners(self, rng):
        for _ in range(40):
            n = rng.randint(2, 24)
            d = random_decomposition(n, rng)
            o = build_types_oracle(d)
            m = realize(d)
            want = sorted((j, i) for i, j in corners(m))
            assert sorted(o.boundary.corner_points) == want

    def test_corner_sweep_equals_probe_method(self, rng):
        for _ in range(30):
            n = rng.randint(2, 20)
            d = random_decomposition(n, rng)
            o = build_types_oracle(d)
            m = realize(d)
            assert sorted(o.boundary.corner_points) == corner_points_by_probes(
                d, m.entry
            )

    def test_boundary_segment_count_linear_in_rects(self, rng):
        # Maximal runs per orientation never exceed two per rectangle edge.
        for _ in range(20):
            n = rng.randint(2, 24)
            d = random_decomposition(n, rng)
            b = AreaBoundary.from_decomposition(d)
            k = max(1, len(d.rects))
            assert len(b.hsegs) <= 2 * k
            assert len(b.vsegs) <= 2 * k

    def test_boundary_edges_belong_to_exactly_one_rect(self):
        # Two vertically abutting rectangles cancel their shared edge.
        b = AreaBoundary.from_decomposition(dec(4, (1, 2, 1, 2), (3, 4, 1, 2)))
        hline_ys = sorted(y for y, _, _ in b.hsegs)
        assert hline_ys == [0, 8]  # doubled: top of the union, bottom only


class TestEntry:
    def test_empty(self):
        o = build_types_oracle(dec(3))
        assert all(entry(o, i, j) == 0 for i in (1, 2, 3) for j in (1, 2, 3))

    def test_unit_rect(self):
        o = build_types_oracle(dec(3, (1, 1, 1, 1)))
        assert entry(o, 1, 1) == 1
        assert entry(o, 1, 2) == 0

    def test_matches_realized_matrix(self, rng):
        for _ in range(12):
            n = rng.choice([5, 16, 33, 64, 128])
            d = random_decomposition(n, rng)
            o = build_types_oracle(d)
            m = realize(d)
            for i in range(1, n + 1):
                for j in range(1, n + 1):
                    assert entry(o, i, j) == m.entry(i, j)

    def test_bounds(self):
        o = build_types_oracle(dec(3))
        with pytest.raises(BoundsError):
            entry(o, 0, 1)
        with pytest.raises(BoundsError):
            entry(o, 1, 4)


class TestQueryType:
    def test_unit_zone_constant(self):
        o = build_types_oracle(dec(3, (1, 2, 1, 2)))
        assert query_type(o, Rect(1, 1, 1, 1)) is SubmatrixType.CONSTANT1
        assert query_type(o, Rect(3, 3, 3, 3)) is SubmatrixType.CONSTANT0

    def test_vertical(self):
        o = build_types_oracle(dec(2, (1, 2, 2, 2)))
        assert realize(o.dec).to_literal() == "01;01"
        assert query_type(o, Rect(1, 2, 1, 2)) is SubmatrixType.VERTICAL

    def test_mixed_diagonal(self):
        o = build_types_oracle(dec(2, (1, 1, 2, 2), (2, 2, 1, 1)))
        assert realize(o.dec).to_literal() == "01;10"
        assert query_type(o, Rect(1, 2, 1, 2)) is SubmatrixType.MIXED

    def test_exhaustive_equivalence_small(self, rng):
        for _ in range(8):
            n = rng.randint(2, 20)
            d = random_decomposition(n, rng)
            o = build_types_oracle(d)
            fc = FastClassifier(realize(d))
            for r1, r2 in itertools.combinations_with_replacement(range(1, n + 1), 2):
                for c1, c2 in itertools.combinations_with_replacement(
                    range(1, n + 1), 2
                ):
                    got = o.query_type(Rect(r1, r2, c1, c2))
                    assert got is fc.classify(r1, r2, c1, c2)

    def test_thin_submatrices(self, rng):
        n = 17
        d = random_decomposition(n, rng)
        o = build_types_oracle(d)
        m = realize(d)
        for i in range(1, n + 1):
            assert query_type(o, Rect(i, i, 1, n)) is classify(m, Rect(i, i, 1, n))
            assert query_type(o, Rect(1, n, i, i)) is classify(m, Rect(1, n, i, i))

    def test_debug_mode_build(self, monkeypatch, rng):
        monkeypatch.setenv("TWINMAT_DEBUG", "1")
        d = random_decomposition(9, rng)
        o = build_types_oracle(d)
        m = realize(d)
        assert query_type(o, Rect(1, 9, 1, 9)) is classify(m, Rect(1, 9, 1, 9))

    def test_structure_bits_reported(self, rng):
        small = build_types_oracle(random_decomposition(8, rng))
        large = build_types_oracle(random_decomposition(64, rng, tries=256))
        assert 0 < small.structure_bits() < large.structure_bits()
