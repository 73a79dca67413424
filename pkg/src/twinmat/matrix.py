"""Dense binary matrices, rectangle decompositions, regular divisions, and the
brute-force classification oracles every other module is tested against.

Conventions used throughout the package:

* matrices are square, entries are 0/1, and indices are 1-based: ``entry(i, j)``
  is row ``i``, column ``j`` with ``1 <= i, j <= n``;
* a submatrix is *vertical* when all its rows are equal (columns constant),
  *horizontal* when all its columns are equal (rows constant), *constant* when
  both hold, and *mixed* when neither does;
* 0-based coordinates appear only at serialization and geometry boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import BoundsError, FormatError, OverlapError


class BinaryMatrix:
    """An n x n grid of 0/1 entries backed by a numpy uint8 array."""

    __slots__ = ("n", "a")

    def __init__(self, a: np.ndarray):
        a = np.ascontiguousarray(a, dtype=np.uint8)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise BoundsError(f"matrix must be square, got shape {a.shape}")
        if a.size and int(a.max(initial=0)) > 1:
            raise FormatError("matrix entries must be 0 or 1")
        self.a = a
        self.n = a.shape[0]

    @classmethod
    def zeros(cls, n: int) -> "BinaryMatrix":
        return cls(np.zeros((n, n), dtype=np.uint8))

    @classmethod
    def from_literal(cls, text: str) -> "BinaryMatrix":
        """Parse a row-major literal like ``"01;10"`` (rows joined by ';')."""
        rows = text.split(";")
        try:
            a = np.array([[int(ch) for ch in row] for row in rows], dtype=np.uint8)
        except ValueError as exc:
            raise FormatError(f"bad matrix literal {text!r}") from exc
        if a.ndim != 2:
            raise FormatError("matrix literal rows have unequal lengths")
        return cls(a)

    def to_literal(self) -> str:
        return ";".join("".join(str(int(v)) for v in row) for row in self.a)

    def entry(self, i: int, j: int) -> int:
        if not (1 <= i <= self.n and 1 <= j <= self.n):
            raise BoundsError(f"entry ({i},{j}) outside 1..{self.n}")
        return int(self.a[i - 1, j - 1])

    def view(self, z: "Rect") -> np.ndarray:
        """Read-only numpy view of the submatrix at zone z (validates bounds)."""
        z.check_within(self.n)
        return self.a[z.r1 - 1 : z.r2, z.c1 - 1 : z.c2]

    def __eq__(self, other) -> bool:
        return isinstance(other, BinaryMatrix) and np.array_equal(self.a, other.a)

    def __hash__(self):
        return hash((self.n, self.a.tobytes()))

    def __repr__(self):
        if self.n <= 8:
            return f"BinaryMatrix({self.to_literal()!r})"
        return f"BinaryMatrix(n={self.n})"


@dataclass(frozen=True)
class Rect:
    """1-based inclusive row/column bounds of a rectangular submatrix."""

    r1: int
    r2: int
    c1: int
    c2: int

    def __post_init__(self):
        if not (1 <= self.r1 <= self.r2 and 1 <= self.c1 <= self.c2):
            raise BoundsError(f"degenerate rectangle {self}")

    def check_within(self, n: int) -> None:
        if self.r2 > n or self.c2 > n:
            raise BoundsError(f"rectangle {self} exceeds n={n}")

    @property
    def rows(self) -> int:
        return self.r2 - self.r1 + 1

    @property
    def cols(self) -> int:
        return self.c2 - self.c1 + 1

    @property
    def area(self) -> int:
        return self.rows * self.cols

    def contains(self, i: int, j: int) -> bool:
        return self.r1 <= i <= self.r2 and self.c1 <= j <= self.c2

    def intersects(self, other: "Rect") -> bool:
        return not (
            self.r2 < other.r1
            or other.r2 < self.r1
            or self.c2 < other.c1
            or other.c2 < self.c1
        )


class SubmatrixType(Enum):
    CONSTANT0 = "constant0"
    CONSTANT1 = "constant1"
    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"
    MIXED = "mixed"

    @property
    def is_constant(self) -> bool:
        return self in (SubmatrixType.CONSTANT0, SubmatrixType.CONSTANT1)

    @property
    def constant_value(self) -> int:
        if self is SubmatrixType.CONSTANT0:
            return 0
        if self is SubmatrixType.CONSTANT1:
            return 1
        raise ValueError(f"{self} is not constant")


@dataclass(frozen=True)
class RectangleDecomposition:
    """A set of pairwise disjoint all-1 rectangles; realizes a binary matrix."""

    n: int
    rects: tuple[Rect, ...]

    def __post_init__(self):
        if self.n < 1:
            raise BoundsError(f"n must be positive, got {self.n}")
        object.__setattr__(self, "rects", tuple(self.rects))

    def validate(self) -> None:
        """Raise BoundsError / OverlapError unless the rectangles are in range
        and pairwise disjoint. Runs a column sweep, O(k log k)."""
        for r in self.rects:
            r.check_within(self.n)
        events = []  # (col, phase, r1, r2); removals phase 0 before inserts 1
        for idx, r in enumerate(self.rects):
            events.append((r.c1, 1, r.r1, r.r2, idx))
            events.append((r.c2 + 1, 0, r.r1, r.r2, idx))
        events.sort(key=lambda e: (e[0], e[1]))
        active: list[tuple[int, int, int]] = []  # (r1, r2, idx) sorted by r1
        import bisect

        for _col, phase, r1, r2, idx in events:
            if phase == 0:
                active.remove((r1, r2, idx))
            else:
                pos = bisect.bisect_left(active, (r1, r2, idx))
                if pos > 0 and active[pos - 1][1] >= r1:
                    raise OverlapError(
                        f"rectangles {active[pos - 1][2]} and {idx} overlap"
                    )
                if pos < len(active) and active[pos][0] <= r2:
                    raise OverlapError(f"rectangles {active[pos][2]} and {idx} overlap")
                active.insert(pos, (r1, r2, idx))

    def dump(self) -> str:
        """Text format: line 1 ``n k``, then k lines ``r1 r2 c1 c2``."""
        lines = [f"{self.n} {len(self.rects)}"]
        lines.extend(f"{r.r1} {r.r2} {r.c1} {r.c2}" for r in self.rects)
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> "RectangleDecomposition":
        lines = text.splitlines()
        if not lines:
            raise FormatError("line 1: empty decomposition file")
        head = lines[0].split()
        if len(head) != 2:
            raise FormatError("line 1: expected 'n k'")
        try:
            n, k = int(head[0]), int(head[1])
        except ValueError as exc:
            raise FormatError("line 1: expected integers 'n k'") from exc
        if len(lines) < k + 1:
            raise FormatError(f"expected {k} rectangle lines, got {len(lines) - 1}")
        rects = []
        for ln in range(1, k + 1):
            parts = lines[ln].split()
            if len(parts) != 4:
                raise FormatError(f"line {ln + 1}: expected 'r1 r2 c1 c2'")
            try:
                r1, r2, c1, c2 = (int(p) for p in parts)
            except ValueError as exc:
                raise FormatError(f"line {ln + 1}: non-integer bound") from exc
            try:
                rects.append(Rect(r1, r2, c1, c2))
            except BoundsError as exc:
                raise FormatError(f"line {ln + 1}: {exc}") from exc
        dec = cls(n, tuple(rects))
        dec.validate()
        return dec


def realize(dec: RectangleDecomposition) -> BinaryMatrix:
    """Paint the decomposition's rectangles into a zero grid."""
    dec.validate()
    a = np.zeros((dec.n, dec.n), dtype=np.uint8)
    for r in dec.rects:
        a[r.r1 - 1 : r.r2, r.c1 - 1 : r.c2] = 1
    return BinaryMatrix(a)


def classify(m: BinaryMatrix, z: Rect) -> SubmatrixType:
    """Brute-force type of the submatrix at z: constant / vertical (all rows
    equal) / horizontal (all columns equal) / mixed. O(area)."""
    sub = m.view(z)
    rows_equal = bool((sub == sub[0:1, :]).all())
    cols_equal = bool((sub == sub[:, 0:1]).all())
    if rows_equal and cols_equal:
        return SubmatrixType.CONSTANT1 if sub[0, 0] else SubmatrixType.CONSTANT0
    if rows_equal:
        return SubmatrixType.VERTICAL
    if cols_equal:
        return SubmatrixType.HORIZONTAL
    return SubmatrixType.MIXED


def corners(m: BinaryMatrix) -> list[tuple[int, int]]:
    """All (i, j) such that the 2x2 submatrix at rows i,i+1 / columns j,j+1 is
    mixed. A submatrix is mixed exactly when it contains such a window."""
    if m.n < 2:
        return []
    a = m.a
    nw, ne = a[:-1, :-1], a[:-1, 1:]
    sw, se = a[1:, :-1], a[1:, 1:]
    mixed = ((nw != ne) | (sw != se)) & ((nw != sw) | (ne != se))
    ii, jj = np.nonzero(mixed)
    return [(int(i) + 1, int(j) + 1) for i, j in zip(ii, jj)]


def cibulka_constant(t: int) -> float:
    """Density threshold c_t = (8/3)(t+1)^2 * 2^(4t) forcing a t-grid minor."""
    return (8.0 / 3.0) * (t + 1) ** 2 * 2.0 ** (4 * t)


@dataclass(frozen=True)
class RegularDivision:
    """The division of an n x n matrix into s x s zones; the last row/column
    block keeps ``n mod s`` lines when s does not divide n."""

    n: int
    s: int

    def __post_init__(self):
        if not (1 <= self.s <= self.n):
            raise BoundsError(f"need 1 <= s <= n, got s={self.s}, n={self.n}")

    @property
    def t(self) -> int:
        """Number of row (= column) blocks."""
        return -(-self.n // self.s)

    def zone_bounds(self, i: int, j: int) -> Rect:
        if not (1 <= i <= self.t and 1 <= j <= self.t):
            raise BoundsError(f"zone ({i},{j}) outside 1..{self.t}")
        s, n = self.s, self.n
        return Rect((i - 1) * s + 1, min(i * s, n), (j - 1) * s + 1, min(j * s, n))


def zone_bounds(div: RegularDivision, i: int, j: int) -> Rect:
    return div.zone_bounds(i, j)


def zone_family_naive(m: BinaryMatrix, s: int) -> list[np.ndarray]:
    """Distinct zones of the s-regular division, deduplicated by shape and
    bit content. The reference oracle for the compact layers' family sizes."""
    div = RegularDivision(m.n, s)
    seen: dict[tuple[int, int, bytes], np.ndarray] = {}
    for i in range(1, div.t + 1):
        for j in range(1, div.t + 1):
            sub = m.view(div.zone_bounds(i, j))
            key = (sub.shape[0], sub.shape[1], sub.tobytes())
            if key not in seen:
                seen[key] = sub.copy()
    return list(seen.values())


def zone_family_count(m: BinaryMatrix, s: int) -> int:
    return len(zone_family_naive(m, s))


@dataclass(frozen=True)
class DivisionDiagnostics:
    mixed_zones: int
    mixed_cuts: int
    split_corners: int
    vertical_strips: int
    horizontal_strips: int


def _strip_count(m: BinaryMatrix, div: RegularDivision, vertical: bool) -> int:
    # A strip is a maximal run of non-constant vertical (resp. horizontal)
    # zones in one column (resp. row) block whose union stays vertical
    # (resp. horizontal): equivalently, consecutive zones repeating the same
    # line vector. Maximal singleton runs count as strips.
    want = SubmatrixType.VERTICAL if vertical else SubmatrixType.HORIZONTAL
    t = div.t
    count = 0
    for fixed in range(1, t + 1):
        run_vec: bytes | None = None
        for walk in range(1, t + 1):
            z = div.zone_bounds(walk, fixed) if vertical else div.zone_bounds(fixed, walk)
            if classify(m, z) is want:
                vec = m.view(z)[0, :].tobytes() if vertical else m.view(z)[:, 0].tobytes()
                if vec != run_vec:
                    count += 1
                run_vec = vec
            else:
                run_vec = None
    return count


def diagnostics(m: BinaryMatrix, s: int) -> DivisionDiagnostics:
    """Brute-force counts of mixed zones, mixed cuts, split corners, and
    strips in the s-regular division."""
    div = RegularDivision(m.n, s)
    t = div.t
    mixed_zones = sum(
        1
        for i in range(1, t + 1)
        for j in range(1, t + 1)
        if classify(m, div.zone_bounds(i, j)) is SubmatrixType.MIXED
    )
    cuts: set[tuple[str, int, int, int]] = set()
    split = 0
    for i, j in corners(m):
        row_straddle = i % s == 0
        col_straddle = j % s == 0
        if row_straddle and col_straddle:
            split += 1
        elif row_straddle:
            # Corner crosses the boundary between vertically adjacent zones.
            cuts.add(("v", (i - 1) // s + 1, (j - 1) // s + 1, 0))
        elif col_straddle:
            cuts.add(("h", (i - 1) // s + 1, (j - 1) // s + 1, 0))
    return DivisionDiagnostics(
        mixed_zones=mixed_zones,
        mixed_cuts=len(cuts),
        split_corners=split,
        vertical_strips=_strip_count(m, div, vertical=True),
        horizontal_strips=_strip_count(m, div, vertical=False),
    )
