"""Contraction sequences: verification of the per-division error value,
extraction of rectangle decompositions, and a generator of matrices that come
with a verified witness sequence.

A contraction sequence for an n x n matrix is a list of 2n-2 merge steps,
each ("R", p) or ("C", p), merging consecutive block p with block p+1 of the
current division. Replayed from the finest division (every line its own
block) it must end at the coarsest (one row block, one column block).
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .errors import BoundsError, FormatError, MalformedSequence
from .matrix import BinaryMatrix, Rect, RectangleDecomposition, classify

_BOT = 2  # zone-state marker: entries disagree (or are not yet determined)


@dataclass(frozen=True)
class Division:
    """Ordered partitions of rows and columns into consecutive blocks,
    stored as 1-based inclusive (start, end) pairs."""

    row_blocks: tuple[tuple[int, int], ...]
    col_blocks: tuple[tuple[int, int], ...]

    @classmethod
    def finest(cls, n: int) -> "Division":
        blocks = tuple((i, i) for i in range(1, n + 1))
        return cls(blocks, blocks)

    @classmethod
    def coarsest(cls, n: int) -> "Division":
        return cls(((1, n),), ((1, n),))

    def validate(self, n: int) -> None:
        for blocks in (self.row_blocks, self.col_blocks):
            pos = 1
            for start, end in blocks:
                if start != pos or end < start:
                    raise BoundsError(f"blocks {blocks} do not tile 1..{n}")
                pos = end + 1
            if pos != n + 1:
                raise BoundsError(f"blocks {blocks} do not cover 1..{n}")

    def merge(self, axis: str, p: int) -> "Division":
        blocks = self.row_blocks if axis == "R" else self.col_blocks
        if not (1 <= p <= len(blocks) - 1):
            raise MalformedSequence(f"merge index {p} invalid for {len(blocks)} blocks")
        merged = blocks[: p - 1] + ((blocks[p - 1][0], blocks[p][1]),) + blocks[p + 1 :]
        if axis == "R":
            return Division(merged, self.col_blocks)
        return Division(self.row_blocks, merged)


@dataclass(frozen=True)
class ContractionSequence:
    n: int
    steps: tuple[tuple[str, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple((a, int(p)) for a, p in self.steps))

    def validate(self) -> None:
        """Structural check: 2n-2 steps that reduce finest -> coarsest."""
        if len(self.steps) != 2 * self.n - 2:
            raise MalformedSequence(
                f"expected {2 * self.n - 2} steps, got {len(self.steps)}"
            )
        rows = cols = self.n
        for axis, p in self.steps:
            if axis == "R":
                if not (1 <= p <= rows - 1):
                    raise MalformedSequence(f"row merge at {p} with {rows} blocks")
                rows -= 1
            elif axis == "C":
                if not (1 <= p <= cols - 1):
                    raise MalformedSequence(f"column merge at {p} with {cols} blocks")
                cols -= 1
            else:
                raise MalformedSequence(f"unknown axis {axis!r}")
        if rows != 1 or cols != 1:
            raise MalformedSequence("sequence does not reach the coarsest division")

    def dump(self) -> str:
        """Text format: line 1 ``n``, then 2n-2 lines ``R p`` / ``C p``."""
        lines = [str(self.n)]
        lines.extend(f"{a} {p}" for a, p in self.steps)
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> "ContractionSequence":
        lines = text.splitlines()
        if not lines:
            raise FormatError("line 1: empty sequence file")
        try:
            n = int(lines[0])
        except ValueError as exc:
            raise FormatError("line 1: expected n") from exc
        steps = []
        for ln, line in enumerate(lines[1:], start=2):
            parts = line.split()
            if len(parts) != 2 or parts[0] not in ("R", "C"):
                raise FormatError(f"line {ln}: expected 'R p' or 'C p'")
            try:
                steps.append((parts[0], int(parts[1])))
            except ValueError as exc:
                raise FormatError(f"line {ln}: non-integer index") from exc
        seq = cls(n, tuple(steps))
        seq.validate()
        return seq


def error_value(m: BinaryMatrix, div: Division) -> int:
    """Max over all row and column blocks of the number of non-constant zones
    in that block. Brute force, O(n^2)."""
    div.validate(m.n)
    row_counts = [0] * len(div.row_blocks)
    col_counts = [0] * len(div.col_blocks)
    for ri, (r1, r2) in enumerate(div.row_blocks):
        for ci, (c1, c2) in enumerate(div.col_blocks):
            if not classify(m, Rect(r1, r2, c1, c2)).is_constant:
                row_counts[ri] += 1
                col_counts[ci] += 1
    return max(row_counts + col_counts)


class _Replay:
    """Incremental zone-state simulation shared by the verifier and the
    decomposition extractor. Merged blocks reuse the storage slot of their
    first operand; dead slots keep garbage that is never read again."""

    def __init__(self, m: BinaryMatrix, dtype, combine):
        n = m.n
        self.n = n
        self.grid = m.a.astype(dtype)
        self.row_slots = list(range(n))
        self.col_slots = list(range(n))
        # Block extents per slot, 0-based half-open.
        self.row_iv = [(i, i + 1) for i in range(n)]
        self.col_iv = [(i, i + 1) for i in range(n)]
        self.live_rows = np.ones(n, dtype=bool)
        self.live_cols = np.ones(n, dtype=bool)
        self.combine = combine

    def merge(self, axis: str, p: int):
        """Merge blocks p, p+1 (1-based). Returns (kept, dropped, old_a,
        old_b, new_row) where the arrays run over the other axis' slots."""
        slots = self.row_slots if axis == "R" else self.col_slots
        if not (1 <= p <= len(slots) - 1):
            raise MalformedSequence(f"merge index {p} invalid for {len(slots)} blocks")
        a, b = slots[p - 1], slots[p]
        if axis == "R":
            va = self.grid[a].copy()
            vb = self.grid[b]
            new = self.combine(va, vb)
            self.grid[a] = new
            self.live_rows[b] = False
            self.row_iv[a] = (self.row_iv[a][0], self.row_iv[b][1])
        else:
            va = self.grid[:, a].copy()
            vb = self.grid[:, b]
            new = self.combine(va, vb)
            self.grid[:, a] = new
            self.live_cols[b] = False
            self.col_iv[a] = (self.col_iv[a][0], self.col_iv[b][1])
        del slots[p]
        return a, b, va, vb, new


def verify_sequence(
    m: BinaryMatrix, seq: ContractionSequence, d: int
) -> tuple[bool, int]:
    """True iff every division along the sequence (endpoints included) has
    error value at most d; also returns the maximum error value observed."""
    if seq.n != m.n:
        raise MalformedSequence(f"sequence is for n={seq.n}, matrix has n={m.n}")
    seq.validate()

    def combine(va, vb):
        return np.where((va == vb) & (va != _BOT), va, _BOT)

    rp = _Replay(m, np.int8, combine)
    n = m.n
    row_cnt = np.zeros(n, dtype=np.int32)
    col_cnt = np.zeros(n, dtype=np.int32)
    max_err = 0  # finest division always has error 0
    for axis, p in seq.steps:
        a, b, va, vb, new = rp.merge(axis, p)
        bot_new = new == _BOT
        delta = bot_new.astype(np.int32) - (va == _BOT) - (vb == _BOT)
        if axis == "R":
            col_cnt += delta * rp.live_cols
            row_cnt[a] = int(np.count_nonzero(bot_new & rp.live_cols))
            row_cnt[b] = 0
        else:
            row_cnt += delta * rp.live_rows
            col_cnt[a] = int(np.count_nonzero(bot_new & rp.live_rows))
            col_cnt[b] = 0
        err = max(int(row_cnt.max()), int(col_cnt.max()))
        if err > max_err:
            max_err = err
    return max_err <= d, max_err


def extract_decomposition(
    m: BinaryMatrix, seq: ContractionSequence
) -> RectangleDecomposition:
    """Collect the inclusion-maximal all-1 zones over every division of the
    sequence. The zones over all divisions form a laminar family, so a zone is
    maximal exactly when the zone it merges into is no longer all-1; the final
    whole-matrix zone is kept when it is all-1 itself."""
    if seq.n != m.n:
        raise MalformedSequence(f"sequence is for n={seq.n}, matrix has n={m.n}")
    seq.validate()

    rp = _Replay(m, bool, lambda va, vb: va & vb)
    rects: list[Rect] = []

    def emit(slot_iv, other_ivs, mask, axis):
        for os_ in np.nonzero(mask)[0]:
            o1, o2 = other_ivs[os_]
            s1, s2 = slot_iv
            if axis == "R":
                rects.append(Rect(s1 + 1, s2, o1 + 1, o2))
            else:
                rects.append(Rect(o1 + 1, o2, s1 + 1, s2))

    for axis, p in seq.steps:
        if axis == "R":
            iv_a = rp.row_iv[rp.row_slots[p - 1]]
            iv_b = rp.row_iv[rp.row_slots[p]]
        else:
            iv_a = rp.col_iv[rp.col_slots[p - 1]]
            iv_b = rp.col_iv[rp.col_slots[p]]
        a, b, va, vb, new = rp.merge(axis, p)
        live = rp.live_cols if axis == "R" else rp.live_rows
        other_ivs = rp.col_iv if axis == "R" else rp.row_iv
        broken = ~new & live
        emit(iv_a, other_ivs, va & broken, axis)
        emit(iv_b, other_ivs, vb & broken, axis)
    # Root zone: the coarsest division's single zone has no parent.
    ra = rp.row_slots[0]
    ca = rp.col_slots[0]
    if bool(rp.grid[ra, ca]):
        rects.append(Rect(1, m.n, 1, m.n))
    dec = RectangleDecomposition(m.n, tuple(rects))
    dec.validate()
    return dec


def generate(
    n: int, d: int, seed: int, divergence: float = 0.5
) -> tuple[BinaryMatrix, ContractionSequence]:
    """Generate a matrix together with a witness sequence whose every division
    has error value at most d.

    Runs the contraction in reverse: starting from the coarsest division,
    split blocks in a uniformly random order (each unused line boundary is one
    candidate split). Zone values are a concrete bit, meaning every entry of
    the zone is already fixed, or an undetermined marker whose entries are
    decided by later splits. Undetermined zones are the only ones counted
    against the per-block budget d, so the budget check is local and sound;
    concrete zones never change again. The recorded splits, reversed, are the
    witness.

    ``divergence`` is the probability of taking a branching opportunity: when
    an undetermined zone splits and both halves could stay undetermined within
    budget, they do so with this probability. Otherwise one half stays
    undetermined whenever it has room, and a zone resolves into two differing
    constants only when shrunk to two entries.
    """
    if n < 1:
        raise BoundsError(f"n must be positive, got {n}")
    if d < 0:
        raise BoundsError(f"d must be nonnegative, got {d}")
    rng = random.Random(seed)
    if n == 1:
        a = np.array([[rng.randint(0, 1)]], dtype=np.uint8)
        return BinaryMatrix(a), ContractionSequence(1, ())

    vals = np.zeros((n, n), dtype=np.uint8)
    # Per-axis block lists in position order: starts[] and slots[] parallel.
    row_starts, row_slots = [0], [0]
    col_starts, col_slots = [0], [0]
    row_size, col_size = [n] + [0] * (n - 1), [n] + [0] * (n - 1)
    next_row_slot, next_col_slot = 1, 1
    # Undetermined zones per block: row_bot[row slot] = set of column slots.
    row_bot: dict[int, set[int]] = {0: set()}
    col_bot: dict[int, set[int]] = {0: set()}

    if d >= 1:
        vals[0, 0] = _BOT
        row_bot[0].add(0)
        col_bot[0].add(0)
    else:
        vals[0, 0] = rng.randint(0, 1)

    import bisect

    boundaries = [("R", b) for b in range(1, n)] + [("C", b) for b in range(1, n)]
    rng.shuffle(boundaries)
    steps_rev: list[tuple[str, int]] = []

    def decide(a_slot, b_slot, other_slot, area_a, area_b, other_bot, my_bot_a, my_bot_b):
        """Children values for an undetermined zone split into two. Keeping a
        child undetermined needs >= 2 entries in it; keeping both needs one
        spare unit of the other axis' budget."""
        if (
            area_a >= 2
            and area_b >= 2
            and len(other_bot) + 1 <= d
            and rng.random() < divergence
        ):
            my_bot_b.add(other_slot)
            other_bot.add(b_slot)
            return _BOT, _BOT
        sides = []
        if area_a >= 2:
            sides.append("first")
        if area_b >= 2:
            sides.append("second")
        if sides:
            if rng.choice(sides) == "first":
                return _BOT, rng.randint(0, 1)
            my_bot_a.discard(other_slot)
            my_bot_b.add(other_slot)
            other_bot.discard(a_slot)
            other_bot.add(b_slot)
            return rng.randint(0, 1), _BOT
        v = rng.randint(0, 1)
        my_bot_a.discard(other_slot)
        other_bot.discard(a_slot)
        return v, 1 - v

    for axis, cut in boundaries:
        if axis == "R":
            starts, slots, sizes = row_starts, row_slots, row_size
            q = bisect.bisect_right(starts, cut) - 1
            a = slots[q]
            b = next_row_slot
            next_row_slot += 1
            end = starts[q + 1] if q + 1 < len(starts) else n
            sizes[a], sizes_b = cut - starts[q], end - cut
            sizes[b] = sizes_b
            starts.insert(q + 1, cut)
            slots.insert(q + 1, b)
            vals[b, :] = vals[a, :]
            row_bot[b] = set()
            for c in list(row_bot[a]):
                width = col_size[c]
                v1, v2 = decide(
                    a, b, c,
                    sizes[a] * width, sizes[b] * width,
                    col_bot[c], row_bot[a], row_bot[b],
                )
                vals[a, c], vals[b, c] = v1, v2
        else:
            starts, slots, sizes = col_starts, col_slots, col_size
            q = bisect.bisect_right(starts, cut) - 1
            a = slots[q]
            b = next_col_slot
            next_col_slot += 1
            end = starts[q + 1] if q + 1 < len(starts) else n
            sizes[a], sizes_b = cut - starts[q], end - cut
            sizes[b] = sizes_b
            starts.insert(q + 1, cut)
            slots.insert(q + 1, b)
            vals[:, b] = vals[:, a]
            col_bot[b] = set()
            for r in list(col_bot[a]):
                height = row_size[r]
                v1, v2 = decide(
                    a, b, r,
                    height * sizes[a], height * sizes[b],
                    row_bot[r], col_bot[a], col_bot[b],
                )
                vals[r, a], vals[r, b] = v1, v2
        steps_rev.append((axis, q + 1))

    m = BinaryMatrix(vals[np.ix_(row_slots, col_slots)].copy())
    seq = ContractionSequence(n, tuple(reversed(steps_rev)))
    return m, seq
