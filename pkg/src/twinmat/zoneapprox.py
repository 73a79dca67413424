"""Zone approximation: partition the s-regular division of a matrix into
mixed zones, strips, and constant submatrices, yielding representative zones
and a locator that maps every zone to an entrywise-equal representative.

The cover is grown in row-major order. Because covered cells always form a
prefix of each column (invariant maintained by construction), the covered
region is described by an implicit column-height array H[1..m], kept as a set
of maximal equal-value runs in a heap plus a doubly-linked list.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from enum import Enum

from .errors import (
    BoundsError,
    ConstructionInvariantError,
    ContractViolation,
    EmptyError,
    debug_checks,
)
from .geom import PointLocator
from .matrix import Rect, SubmatrixType
from .subtypes import TypesOracle


class _Run:
    __slots__ = ("h", "l", "r", "prev", "next", "alive")

    def __init__(self, h: int, l: int, r: int):
        self.h = h
        self.l = l
        self.r = r
        self.prev = None
        self.next = None
        self.alive = True


class CoverMaintainer:
    """Maximal equal-value runs (h, l, r) of the column-height array H over an
    m x m block grid. Cell (i, j) is covered iff i <= H[j]. Supports
    get_first / extend_right / cover in O(log m)."""

    def __init__(self, m: int):
        if m < 1:
            raise BoundsError(f"grid side must be positive, got {m}")
        self.m = m
        run = _Run(0, 1, m)
        self._head = run
        self._tick = itertools.count()
        self._heap: list = [(0, 1, next(self._tick), run)]

    def _min_run(self) -> _Run:
        heap = self._heap
        while heap:
            run = heap[0][3]
            if run.alive:
                return run
            heapq.heappop(heap)
        raise ConstructionInvariantError("run set is empty")

    def get_first(self):
        """Row-major smallest uncovered (i, j), or None when fully covered."""
        run = self._min_run()
        if run.h == self.m:
            return None
        return run.h + 1, run.l

    def extend_right(self) -> int:
        """Largest j' such that all of (i, j)..(i, j') is uncovered, for
        (i, j) = get_first()."""
        run = self._min_run()
        if run.h == self.m:
            raise EmptyError("grid fully covered")
        return run.r

    def cover(self, i2: int, j2: int) -> None:
        """Cover the rectangle get_first() .. (i2, j2)."""
        run = self._min_run()
        if run.h == self.m:
            raise EmptyError("grid fully covered")
        h, l, r = run.h, run.l, run.r
        if i2 < h + 1 or j2 < l:
            raise ContractViolation(f"cover({i2},{j2}) below get_first ({h + 1},{l})")
        if j2 > r:
            raise ContractViolation(f"cover({i2},{j2}) extends past extend_right={r}")
        if i2 > self.m:
            raise ContractViolation(f"cover({i2},{j2}) exceeds grid side {self.m}")
        left, nxt = run.prev, run.next
        run.alive = False
        new = _Run(i2, l, j2)
        rest = _Run(h, j2 + 1, r) if j2 < r else None
        right_of_new = rest if rest is not None else nxt
        if left is not None and left.h == i2:
            new.l = left.l
            left.alive = False
            left = left.prev
        if rest is None and nxt is not None and nxt.h == i2:
            new.r = nxt.r
            nxt.alive = False
            right_of_new = nxt.next
        new.prev = left
        if left is not None:
            left.next = new
        else:
            self._head = new
        new.next = right_of_new
        if right_of_new is not None:
            right_of_new.prev = new
        if rest is not None:
            rest.next = nxt
            if nxt is not None:
                nxt.prev = rest
            heapq.heappush(self._heap, (rest.h, rest.l, next(self._tick), rest))
        heapq.heappush(self._heap, (new.h, new.l, next(self._tick), new))

    def heights(self) -> list[int]:
        """H[1..m] reconstructed from the runs (testing helper)."""
        out = []
        run = self._head
        while run is not None:
            out.extend([run.h] * (run.r - run.l + 1))
            run = run.next
        return out


class CoverTag(Enum):
    MIXED = "mixed"
    VSTRIP = "vstrip"
    HSTRIP = "hstrip"
    CONSTANT0 = "constant0"
    CONSTANT1 = "constant1"


@dataclass(frozen=True)
class CoverElement:
    rect: Rect  # block coordinates of the s-regular division
    tag: CoverTag


@dataclass
class ZoneCover:
    """Partition of the block grid into cover elements, one representative
    (top-left block) per element, and a point locator resolving xi."""

    s: int
    m: int
    elements: tuple[CoverElement, ...]
    reps: tuple[tuple[int, int], ...]
    _locator: PointLocator

    def xi(self, i: int, j: int) -> tuple[int, int]:
        """Top-left block of the cover element containing block (i, j); the
        zone there equals zone (i, j) entrywise."""
        if not (1 <= i <= self.m and 1 <= j <= self.m):
            raise BoundsError(f"block ({i},{j}) outside 1..{self.m}")
        idx = self._locator.locate(j - 1, i - 1)
        if idx is None:
            raise ConstructionInvariantError(f"block ({i},{j}) not covered")
        return self.reps[idx]


def xi(zc: ZoneCover, i: int, j: int) -> tuple[int, int]:
    return zc.xi(i, j)


def _last_true(lo: int, hi: int, pred) -> int:
    """Largest e in [lo, hi] with pred(e), given pred(lo). Monotone pred."""
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if pred(mid):
            lo = mid
        else:
            hi = mid - 1
    return lo


def zone_approximation(oracle: TypesOracle, s: int) -> ZoneCover:
    """Cover the s-regular division of the oracle's matrix with mixed zones,
    strips, and constant submatrices; s must divide n.

    Each step classifies the first uncovered zone and extends it greedily by
    binary search (types only degrade under extension, so the predicates are
    monotone). Vertical extension may scan the full column: a strip is never
    partially covered, and everything below a column's covered prefix is free.
    Horizontal and constant extensions clip at extend_right().
    """
    n = oracle.n
    if n % s:
        raise BoundsError(f"s={s} does not divide n={n}")
    m = n // s

    def ztype(i1, i2, j1, j2):
        return oracle.query_type(
            Rect((i1 - 1) * s + 1, i2 * s, (j1 - 1) * s + 1, j2 * s)
        )

    cm = CoverMaintainer(m)
    elements: list[CoverElement] = []
    while True:
        first = cm.get_first()
        if first is None:
            break
        i, j = first
        jmax = cm.extend_right()
        t = ztype(i, i, j, j)
        if t is SubmatrixType.MIXED:
            cm.cover(i, j)
            elements.append(CoverElement(Rect(i, i, j, j), CoverTag.MIXED))
        elif t is SubmatrixType.VERTICAL:
            i2 = _last_true(i, m, lambda e: ztype(i, e, j, j) is SubmatrixType.VERTICAL)
            cm.cover(i2, j)
            elements.append(CoverElement(Rect(i, i2, j, j), CoverTag.VSTRIP))
        elif t is SubmatrixType.HORIZONTAL:
            j2 = _last_true(
                j, jmax, lambda e: ztype(i, i, j, e) is SubmatrixType.HORIZONTAL
            )
            cm.cover(i, j2)
            elements.append(CoverElement(Rect(i, i, j, j2), CoverTag.HSTRIP))
        else:
            i2 = _last_true(i, m, lambda e: ztype(i, e, j, j).is_constant)
            j2 = _last_true(j, jmax, lambda e: ztype(i, i2, j, e).is_constant)
            cm.cover(i2, j2)
            tag = CoverTag.CONSTANT1 if t is SubmatrixType.CONSTANT1 else CoverTag.CONSTANT0
            elements.append(CoverElement(Rect(i, i2, j, j2), tag))

    if debug_checks():
        total = sum(el.rect.area for el in elements)
        if total != m * m:
            raise ConstructionInvariantError(
                f"cover areas sum to {total}, expected {m * m}"
            )

    reps = tuple((el.rect.r1, el.rect.c1) for el in elements)
    locator = PointLocator(
        [(el.rect.c1 - 1, el.rect.c2, el.rect.r1 - 1, el.rect.r2) for el in elements],
        list(range(len(elements))),
        universe=m,
    )
    return ZoneCover(s=s, m=m, elements=tuple(elements), reps=reps, _locator=locator)
