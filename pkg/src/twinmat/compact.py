"""The layered compact oracle: granularity schedule, per-layer object pools
with child-id tables, explicit bottom-layer bit blocks, the constant-hop
query, bitsize accounting, and (de)serialization.

Layer i describes the distinct zones of the m_i-regular division of the
padded matrix. An object of layer i < l holds a (m_i/m_{i+1})^2 table of
child object ids into layer i+1; an object of layer l holds its zone as an
explicit m_l x m_l bit block. Layer 0 always has exactly one object, the
whole matrix.
"""

from __future__ import annotations

import struct
import zlib
from array import array
from dataclasses import dataclass

from .errors import (
    BoundsError,
    ConstructionInvariantError,
    FormatError,
    InvalidN,
    debug_checks,
)
from .matrix import RectangleDecomposition
from .subtypes import TypesOracle, build_types_oracle
from .zoneapprox import zone_approximation

_MAGIC = b"TWMX"
_VERSION = 1


@dataclass(frozen=True)
class Schedule:
    """Granularities m_0 > m_1 > ... > m_l, all powers of two dividing n."""

    n: int
    beta: float
    levels: tuple[int, ...]

    @property
    def ell(self) -> int:
        return len(self.levels) - 1


def make_schedule(n: int, beta: float = 1.0) -> Schedule:
    """Granularity schedule for a padded side length n (a power of two).

    Starting from m_0 = n, the side shrinks by the 2/3-power rule while at
    least log2(n)^3, then halves; the first value at or below the bottom
    threshold log2(n) / (2 beta) ends the schedule (a side of 1 always does).
    """
    if n < 1 or n & (n - 1):
        raise InvalidN(f"n must be a power of two, got {n}")
    if beta <= 0:
        raise BoundsError(f"beta must be positive, got {beta}")
    log2n = n.bit_length() - 1
    cube = log2n**3
    levels = [n]
    while True:
        m = levels[-1]
        if m == 1 or 2.0 * beta * m <= log2n:
            break
        if m >= cube:
            e = m.bit_length() - 1
            levels.append(1 << (2 * e // 3))
        else:
            levels.append(m // 2)
    return Schedule(n=n, beta=beta, levels=tuple(levels))


class CompactOracle:
    """Queryable layered representation; immutable once built."""

    def __init__(self, n_original, n_padded, beta, schedule, tables, counts, blocks):
        self.n_original = n_original
        self.n_padded = n_padded
        self.beta = beta
        self.schedule = schedule
        self.tables = tables  # list of array('i'), one per layer < ell
        self.counts = counts  # family size per layer, len ell+1
        self.blocks = blocks  # bottom-layer bit blocks, byte-aligned per object
        self.root = 0

    @property
    def ell(self) -> int:
        return self.schedule.ell

    def __eq__(self, other):
        return (
            isinstance(other, CompactOracle)
            and self.n_original == other.n_original
            and self.n_padded == other.n_padded
            and self.beta == other.beta
            and self.schedule == other.schedule
            and self.counts == other.counts
            and all(a == b for a, b in zip(self.tables, other.tables))
            and self.blocks == other.blocks
        )


def _radix_order(keys: list[bytes]) -> list[int]:
    """Stable LSD radix sort of equal-length byte strings; returns the index
    order."""
    order = list(range(len(keys)))
    if len(keys) <= 1:
        return order
    width = len(keys[0])
    for pos in range(width - 1, -1, -1):
        buckets: list[list[int]] = [[] for _ in range(256)]
        for idx in order:
            buckets[keys[idx][pos]].append(idx)
        order = [i for b in buckets for i in b]
    return order


def _block_stride(m: int) -> int:
    return (m * m + 7) // 8


def build(dec: RectangleDecomposition, beta: float = 1.0, epsilon: float = 0.5) -> CompactOracle:
    """Construct the oracle bottom-up from a rectangle decomposition.

    The side is padded to the next power of two with zero fill. One types
    oracle serves all layers. For each granularity, zone approximation yields
    representatives and the xi locator; the bottom layer deduplicates the
    representatives' explicit bit blocks by radix sort, upper layers describe
    each representative as a table of child ids (via xi then psi of the layer
    below) and deduplicate the descriptions lexicographically.
    """
    dec.validate()
    n0 = dec.n
    npad = 1 if n0 == 1 else 1 << (n0 - 1).bit_length()
    padded = RectangleDecomposition(npad, dec.rects)
    oracle = build_types_oracle(padded, epsilon)
    sched = make_schedule(npad, beta)
    ms = sched.levels
    ell = sched.ell

    tables: list[array] = [array("i") for _ in range(ell)]
    counts = [0] * (ell + 1)
    blocks = b""
    psi_next: dict[tuple[int, int], int] = {}
    zc_next = None

    for li in range(ell, -1, -1):
        zc = zone_approximation(oracle, ms[li])
        psi: dict[tuple[int, int], int] = {}
        if li == ell:
            mell = ms[li]
            stride = _block_stride(mell)
            keys = []
            for a, b in zc.reps:
                r0 = (a - 1) * mell
                c0 = (b - 1) * mell
                bits = bytearray(stride)
                idx = 0
                for r in range(r0 + 1, r0 + mell + 1):
                    for c in range(c0 + 1, c0 + mell + 1):
                        if oracle.entry(r, c):
                            bits[idx >> 3] |= 1 << (idx & 7)
                        idx += 1
                keys.append(bytes(bits))
            order = _radix_order(keys)
            uniq: list[bytes] = []
            obj_of: dict[bytes, int] = {}
            for pos in order:
                key = keys[pos]
                oid = obj_of.get(key)
                if oid is None:
                    oid = len(uniq)
                    uniq.append(key)
                    obj_of[key] = oid
                psi[zc.reps[pos]] = oid
            blocks = b"".join(uniq)
            counts[li] = len(uniq)
        else:
            ratio = ms[li] // ms[li + 1]
            descs: list[tuple[int, ...]] = []
            for a, b in zc.reps:
                ga0 = (a - 1) * ratio
                gb0 = (b - 1) * ratio
                row = []
                for p in range(1, ratio + 1):
                    for q in range(1, ratio + 1):
                        rep = zc_next.xi(ga0 + p, gb0 + q)
                        row.append(psi_next[rep])
                descs.append(tuple(row))
            order = sorted(range(len(descs)), key=lambda t: descs[t])
            uniq_t: list[tuple[int, ...]] = []
            obj_of_t: dict[tuple[int, ...], int] = {}
            for pos in order:
                dd = descs[pos]
                oid = obj_of_t.get(dd)
                if oid is None:
                    oid = len(uniq_t)
                    uniq_t.append(dd)
                    obj_of_t[dd] = oid
                psi[zc.reps[pos]] = oid
            if debug_checks():
                _check_dedup_classes(oracle, zc, psi, ms[li])
            flat = array("i")
            for dd in uniq_t:
                flat.extend(dd)
            tables[li] = flat
            counts[li] = len(uniq_t)
        psi_next = psi
        zc_next = zc

    if counts[0] != 1:
        raise ConstructionInvariantError(f"layer 0 has {counts[0]} objects")
    return CompactOracle(n0, npad, beta, sched, tables, counts, blocks)


def _check_dedup_classes(oracle: TypesOracle, zc, psi, s: int, samples: int = 16) -> None:
    """Debug: representatives mapped to one object must be entrywise equal."""
    import random

    by_obj: dict[int, list[tuple[int, int]]] = {}
    for rep, oid in psi.items():
        by_obj.setdefault(oid, []).append(rep)
    rng = random.Random(0)
    for reps in by_obj.values():
        if len(reps) < 2:
            continue
        (a1, b1), (a2, b2) = reps[0], reps[1]
        for _ in range(samples):
            dr = rng.randrange(s)
            dc = rng.randrange(s)
            e1 = oracle.entry((a1 - 1) * s + 1 + dr, (b1 - 1) * s + 1 + dc)
            e2 = oracle.entry((a2 - 1) * s + 1 + dr, (b2 - 1) * s + 1 + dc)
            if e1 != e2:
                raise ConstructionInvariantError(
                    f"dedup class at s={s} contains unequal zones"
                )


def query_with_hops(o: CompactOracle, i: int, j: int) -> tuple[int, int]:
    """(entry, dereference count); the count always equals the layer depth."""
    if not (1 <= i <= o.n_original and 1 <= j <= o.n_original):
        raise BoundsError(f"query ({i},{j}) outside 1..{o.n_original}")
    ms = o.schedule.levels
    i0 = i - 1
    j0 = j - 1
    obj = o.root
    hops = 0
    for kk in range(o.ell):
        t = ms[kk + 1]
        ratio = ms[kk] // t
        obj = o.tables[kk][obj * ratio * ratio + (i0 // t) * ratio + (j0 // t)]
        i0 %= t
        j0 %= t
        hops += 1
    mell = ms[-1]
    bit = i0 * mell + j0
    byte = o.blocks[obj * _block_stride(mell) + (bit >> 3)]
    return (byte >> (bit & 7)) & 1, hops


def query(o: CompactOracle, i: int, j: int) -> int:
    return query_with_hops(o, i, j)[0]


@dataclass(frozen=True)
class LayerBits:
    index: int
    family: int
    table_cells: int
    id_width: int
    bits: int


@dataclass(frozen=True)
class BitsizeReport:
    accounting: str
    n_original: int
    n_padded: int
    layers: tuple[LayerBits, ...]
    bottom_family: int
    bottom_bits: int
    total_bits: int

    @property
    def bits_per_n(self) -> float:
        return self.total_bits / self.n_original


def packed_width(count: int) -> int:
    """Child-id width in bits for a family of the given size, minimum 1."""
    return max(1, (count - 1).bit_length())


def bitsize(o: CompactOracle, accounting: str = "packed") -> BitsizeReport:
    """Logical bitsize: per layer i < l the family size times table cells
    times id width, plus the explicit bottom blocks. ``packed`` sizes ids to
    the layer below's family, ``paper`` charges log2(n_padded) per id."""
    if accounting not in ("packed", "paper"):
        raise BoundsError(f"unknown accounting mode {accounting!r}")
    ms = o.schedule.levels
    logn = max(1, o.n_padded.bit_length() - 1)
    layers = []
    total = 0
    for i in range(o.ell):
        ratio = ms[i] // ms[i + 1]
        cells = ratio * ratio
        w = packed_width(o.counts[i + 1]) if accounting == "packed" else logn
        bits = o.counts[i] * cells * w
        layers.append(LayerBits(i, o.counts[i], cells, w, bits))
        total += bits
    bottom_bits = o.counts[o.ell] * ms[-1] * ms[-1]
    total += bottom_bits
    return BitsizeReport(
        accounting=accounting,
        n_original=o.n_original,
        n_padded=o.n_padded,
        layers=tuple(layers),
        bottom_family=o.counts[o.ell],
        bottom_bits=bottom_bits,
        total_bits=total,
    )


def serialize(o: CompactOracle) -> bytes:
    """Little-endian stream: magic, version, sizes, beta, layer count, then
    per upper layer its object count, id width, and bit-packed tables, then
    the bottom object count and bit blocks, then a trailing CRC32."""
    out = bytearray()
    out += _MAGIC
    out += struct.pack("<HQQdH", _VERSION, o.n_original, o.n_padded, o.beta, o.ell)
    ms = o.schedule.levels
    for i in range(o.ell):
        w = packed_width(o.counts[i + 1])
        out += struct.pack("<QB", o.counts[i], w)
        acc = 0
        nbits = 0
        for v in o.tables[i]:
            acc |= v << nbits
            nbits += w
            while nbits >= 8:
                out.append(acc & 0xFF)
                acc >>= 8
                nbits -= 8
        if nbits:
            out.append(acc & 0xFF)
    out += struct.pack("<Q", o.counts[o.ell])
    out += o.blocks
    out += struct.pack("<I", zlib.crc32(bytes(out)) & 0xFFFFFFFF)
    return bytes(out)


def deserialize(data: bytes) -> CompactOracle:
    """Inverse of :func:`serialize`; raises FormatError on any malformation
    and never returns a partially initialized oracle."""
    if len(data) < 4 + 2 + 8 + 8 + 8 + 2 + 4:
        raise FormatError("stream truncated")
    if data[:4] != _MAGIC:
        raise FormatError("bad magic")
    body, (crc,) = data[:-4], struct.unpack("<I", data[-4:])
    if zlib.crc32(body) & 0xFFFFFFFF != crc:
        raise FormatError("CRC mismatch")
    pos = 4
    version, n_original, n_padded, beta, ell = struct.unpack_from("<HQQdH", body, pos)
    pos += struct.calcsize("<HQQdH")
    if version != _VERSION:
        raise FormatError(f"unsupported version {version}")
    if n_original < 1 or n_original > n_padded:
        raise FormatError("inconsistent matrix sizes")
    try:
        sched = make_schedule(n_padded, beta)
    except (InvalidN, BoundsError) as exc:
        raise FormatError(str(exc)) from exc
    if sched.ell != ell:
        raise FormatError(f"layer count {ell} does not match schedule {sched.ell}")
    ms = sched.levels
    counts = [0] * (ell + 1)
    tables = []
    raw_tables = []
    for i in range(ell):
        if pos + 9 > len(body):
            raise FormatError("stream truncated in layer header")
        cnt, w = struct.unpack_from("<QB", body, pos)
        pos += 9
        counts[i] = cnt
        ratio = ms[i] // ms[i + 1]
        nids = cnt * ratio * ratio
        nbytes = (nids * w + 7) // 8
        if pos + nbytes > len(body):
            raise FormatError("stream truncated in layer table")
        raw_tables.append((cnt, w, ratio, body[pos : pos + nbytes]))
        pos += nbytes
    if pos + 8 > len(body):
        raise FormatError("stream truncated before bottom layer")
    (bottom_cnt,) = struct.unpack_from("<Q", body, pos)
    pos += 8
    counts[ell] = bottom_cnt
    blk_len = bottom_cnt * _block_stride(ms[-1])
    if pos + blk_len != len(body):
        raise FormatError("bottom layer length mismatch")
    blocks = bytes(body[pos : pos + blk_len])
    for i, (cnt, w, ratio, raw) in enumerate(raw_tables):
        if w != packed_width(counts[i + 1]):
            raise FormatError(f"layer {i} id width {w} inconsistent with family")
        nids = cnt * ratio * ratio
        ids = array("i")
        acc = 0
        nbits = 0
        it = iter(raw)
        mask = (1 << w) - 1
        for _ in range(nids):
            while nbits < w:
                acc |= next(it) << nbits
                nbits += 8
            v = acc & mask
            acc >>= w
            nbits -= w
            if v >= counts[i + 1]:
                raise FormatError(f"layer {i} references missing object {v}")
            ids.append(v)
        tables.append(ids)
    if counts[0] != 1:
        raise FormatError(f"layer 0 must hold one object, found {counts[0]}")
    return CompactOracle(n_original, n_padded, beta, sched, tables, counts, blocks)
