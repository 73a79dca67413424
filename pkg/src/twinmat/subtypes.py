"""Submatrix type oracle: preprocess a rectangle decomposition so the type of
any submatrix (constant 0/1, horizontal, vertical, mixed) is answered from
geometry queries instead of entry scans.

The matrix is drawn as the region A = union of unit cells holding a 1, so
cell (i, j) is the unit square [j-1, j] x [i-1, i]. All stored geometry uses
doubled coordinates, which keeps query points and query segments (always at
odd coordinates) off the even-coordinate boundary lattice:

* entries are point-location queries among the doubled rectangles;
* mixedness is range emptiness over the corner set B, the lattice vertices
  (j, i) whose surrounding 2x2 window is mixed;
* a non-mixed submatrix is vertical iff a vertical probe segment along its
  first column crosses no horizontal boundary segment of A (and symmetrically
  for horizontal), which reduces to ray shooting.
"""

from __future__ import annotations

from bisect import bisect_left, insort
from dataclasses import dataclass

from .errors import BoundsError, ConstructionInvariantError, debug_checks
from .geom import PointLocator, RangeEmptiness, RayShooter
from .matrix import Rect, RectangleDecomposition, SubmatrixType


def _coverage_one_runs(intervals: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Maximal half-open runs covered by exactly one of the given half-open
    intervals. Edges covered twice are interior (two abutting rectangles)."""
    deltas: dict[int, int] = {}
    for lo, hi in intervals:
        deltas[lo] = deltas.get(lo, 0) + 1
        deltas[hi] = deltas.get(hi, 0) - 1
    runs = []
    cov = 0
    start = 0
    for pos in sorted(deltas):
        prev = cov
        cov += deltas[pos]
        if prev != 1 and cov == 1:
            start = pos
        elif prev == 1 and cov != 1:
            runs.append((start, pos))
    return runs


@dataclass(frozen=True)
class AreaBoundary:
    """Maximal boundary segments of the 1-area, in doubled coordinates, plus
    the corner set B as undoubled lattice points (x=j, y=i)."""

    n: int
    hsegs: tuple[tuple[int, int, int], ...]  # (y, x1, x2), all even
    vsegs: tuple[tuple[int, int, int], ...]  # (x, y1, y2), all even
    corner_points: tuple[tuple[int, int], ...]

    @classmethod
    def from_decomposition(cls, dec: RectangleDecomposition) -> "AreaBoundary":
        h_by_line: dict[int, list[tuple[int, int]]] = {}
        v_by_line: dict[int, list[tuple[int, int]]] = {}
        for r in dec.rects:
            for y in (r.r1 - 1, r.r2):
                h_by_line.setdefault(y, []).append((r.c1 - 1, r.c2))
            for x in (r.c1 - 1, r.c2):
                v_by_line.setdefault(x, []).append((r.r1 - 1, r.r2))
        hsegs = []  # undoubled (y, x1, x2) with vertex span [x1, x2]
        for y, ivs in h_by_line.items():
            for a, b in _coverage_one_runs(ivs):
                hsegs.append((y, a, b))
        vsegs = []
        for x, ivs in v_by_line.items():
            for a, b in _coverage_one_runs(ivs):
                vsegs.append((x, a, b))
        corner = _corner_vertices(hsegs, vsegs, dec.n)
        return cls(
            n=dec.n,
            hsegs=tuple((2 * y, 2 * a, 2 * b) for y, a, b in sorted(hsegs)),
            vsegs=tuple((2 * x, 2 * a, 2 * b) for x, a, b in sorted(vsegs)),
            corner_points=tuple(corner),
        )


def _corner_vertices(hsegs, vsegs, n: int) -> list[tuple[int, int]]:
    """Lattice vertices strictly inside the grid that touch both a horizontal
    and a vertical boundary segment. The 2x2 entry window around such a vertex
    is mixed, and conversely. Orthogonal sweep, output-sensitive."""
    events = []  # (x, phase): 0 insert h-seg, 1 query v-seg, 2 remove h-seg
    for y, a, b in hsegs:
        if 1 <= y <= n - 1:
            events.append((a, 0, y))
            events.append((b, 2, y))
    for x, a, b in vsegs:
        if 1 <= x <= n - 1:
            lo, hi = max(a, 1), min(b, n - 1)
            if lo <= hi:
                events.append((x, 1, (lo, hi)))
    events.sort(key=lambda e: (e[0], e[1]))
    active: list[int] = []
    out = []
    for x, phase, data in events:
        if phase == 0:
            insort(active, data)
        elif phase == 2:
            del active[bisect_left(active, data)]
        else:
            lo, hi = data
            i = bisect_left(active, lo)
            while i < len(active) and active[i] <= hi:
                out.append((x, active[i]))
                i += 1
    out.sort()
    return out


def corner_points_by_probes(dec: RectangleDecomposition, entry_fn) -> list[tuple[int, int]]:
    """Reference corner finder: examine the 2x2 windows around the four corner
    cells of every rectangle through entry probes. O(|K|) probes."""
    n = dec.n
    windows: set[tuple[int, int]] = set()
    for r in dec.rects:
        for ci in (r.r1, r.r2):
            for cj in (r.c1, r.c2):
                for wi in (ci - 1, ci):
                    for wj in (cj - 1, cj):
                        if 1 <= wi <= n - 1 and 1 <= wj <= n - 1:
                            windows.add((wi, wj))
    memo: dict[tuple[int, int], int] = {}

    def e(i, j):
        v = memo.get((i, j))
        if v is None:
            v = entry_fn(i, j)
            memo[(i, j)] = v
        return v

    out = []
    for i, j in windows:
        nw, ne, sw, se = e(i, j), e(i, j + 1), e(i + 1, j), e(i + 1, j + 1)
        if ((nw != ne) or (sw != se)) and ((nw != sw) or (ne != se)):
            out.append((j, i))
    out.sort()
    return out


class TypesOracle:
    """Answers entry and submatrix-type queries for a realized decomposition
    without ever materializing the dense matrix."""

    def __init__(self, dec: RectangleDecomposition, epsilon: float = 0.5):
        dec.validate()
        self.n = n = dec.n
        self.dec = dec
        self.boundary = AreaBoundary.from_decomposition(dec)
        drects = [
            (2 * (r.c1 - 1), 2 * r.c2, 2 * (r.r1 - 1), 2 * r.r2) for r in dec.rects
        ]
        self._loc = PointLocator(
            drects, list(range(len(drects))), universe=2 * n, epsilon=epsilon
        )
        self._re = RangeEmptiness(self.boundary.corner_points)
        self._ih = RayShooter(
            [(y, x1, x2, None) for y, x1, x2 in self.boundary.hsegs],
            x_max=2 * n,
            y_max=2 * n,
        )
        # Transposed instance: vertical segments become horizontal ones.
        self._iv = RayShooter(
            [(x, y1, y2, None) for x, y1, y2 in self.boundary.vsegs],
            x_max=2 * n,
            y_max=2 * n,
        )
        if debug_checks():
            probed = corner_points_by_probes(dec, self.entry)
            if probed != sorted(self.boundary.corner_points):
                raise ConstructionInvariantError("corner sweep disagrees with probes")

    def structure_bits(self) -> int:
        """Measured logical size of the auxiliary structures; reported for
        inspection, not bounded (only the final compact oracle is)."""
        corner_bits = 2 * len(self.boundary.corner_points) * max(
            1, (2 * self.n).bit_length()
        )
        return (
            self._loc.logical_bits()
            + self._ih.logical_bits()
            + self._iv.logical_bits()
            + corner_bits
        )

    def entry(self, i: int, j: int) -> int:
        if not (1 <= i <= self.n and 1 <= j <= self.n):
            raise BoundsError(f"entry ({i},{j}) outside 1..{self.n}")
        return 1 if self._loc.locate(2 * j - 1, 2 * i - 1) is not None else 0

    def query_type(self, z: Rect) -> SubmatrixType:
        z.check_within(self.n)
        if z.r1 < z.r2 and z.c1 < z.c2:
            if not self._re.empty(z.c1, z.c2 - 1, z.r1, z.r2 - 1):
                return SubmatrixType.MIXED
        vert = self._ih.seg_intersect_empty(2 * z.c1 - 1, 2 * z.r1 - 1, 2 * z.r2 - 1)
        horz = self._iv.seg_intersect_empty(2 * z.r1 - 1, 2 * z.c1 - 1, 2 * z.c2 - 1)
        if vert and horz:
            if self.entry(z.r1, z.c1):
                return SubmatrixType.CONSTANT1
            return SubmatrixType.CONSTANT0
        if vert:
            return SubmatrixType.VERTICAL
        if horz:
            return SubmatrixType.HORIZONTAL
        # A corner-free submatrix is horizontal or vertical; reaching this
        # point means the geometry structures contradict each other.
        raise ConstructionInvariantError(f"inconsistent type tests for {z}")


def build_types_oracle(dec: RectangleDecomposition, epsilon: float = 0.5) -> TypesOracle:
    return TypesOracle(dec, epsilon)


def entry(oracle: TypesOracle, i: int, j: int) -> int:
    return oracle.entry(i, j)


def query_type(oracle: TypesOracle, z: Rect) -> SubmatrixType:
    return oracle.query_type(z)
