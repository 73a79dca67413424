"""Integer-coordinate geometric substructures.

* :class:`PersistentKTree` - a path-copied perfect k-ary tree over the
  universe ``[0, k^h)``. A version is a root id; inserting an interval marks
  the O(kh) canonical base-interval nodes of its decomposition, so membership
  of ``y`` is "some node on the root-to-leaf path is marked". Node pools are
  append-only flat int arrays; old versions are never touched.
* :class:`PointLocator` - orthogonal point location over interior-disjoint
  half-open rectangles, built by sweeping a vertical line left to right and
  snapshotting one tree version per x coordinate.
* :class:`RangeEmptiness` - static orthogonal range emptiness over a point
  set: a segment tree over x with sorted y lists per node.
* :class:`RayShooter` - vertical ray shooting among horizontal segments via a
  path-copied k-ary counting trie keyed by y, one version per x.

All coordinates are nonnegative integers.
"""

from __future__ import annotations

import math
from array import array
from bisect import bisect_left

from .errors import BoundsError, ContractViolation, OverlapError, debug_checks


def _pick_k(universe_size: int, h: int) -> int:
    """Smallest k >= 2 with k**h >= universe_size."""
    k = max(2, int(round(universe_size ** (1.0 / h))))
    while k**h < universe_size:
        k += 1
    while k > 2 and (k - 1) ** h >= universe_size:
        k -= 1
    return k


class PersistentKTree:
    """Persistent perfect k-ary tree of depth h with a payload int per node.

    Payload 0 means unmarked. ``insert(version, lo, hi, payload)`` returns a
    new version with the canonical cover of ``[lo, hi]`` marked; ``remove``
    must be called with an interval that was inserted as-is (caller contract,
    asserted under TWINMAT_DEBUG=1). Queries visit exactly h+1 nodes.
    """

    def __init__(self, k: int, h: int):
        if k < 2 or h < 1:
            raise BoundsError(f"need k >= 2 and h >= 1, got k={k}, h={h}")
        self.k = k
        self.h = h
        self.universe = k**h
        self._stride = k + 1  # [payload, child_0 .. child_{k-1}]
        self._pool = array("i", [0] * self._stride)  # node 0 = empty
        self._span = [k ** (h - d) for d in range(h + 1)]
        self.roots: list[int] = [0]
        self._created_last = 0

    @property
    def node_count(self) -> int:
        return len(self._pool) // self._stride

    def logical_bits(self) -> int:
        """Pool size under id-width accounting: payload bit + k ids per node."""
        w = max(1, (self.node_count - 1).bit_length())
        return self.node_count * (1 + self.k * w)

    def _check_interval(self, lo: int, hi: int) -> None:
        if not (0 <= lo <= hi < self.universe):
            raise BoundsError(f"interval [{lo},{hi}] outside [0,{self.universe})")

    def insert(self, version: int, lo: int, hi: int, payload: int = 1) -> int:
        self._check_interval(lo, hi)
        if payload <= 0:
            raise BoundsError("payload must be a positive integer")
        self._created_last = 0
        root = self._update(version, 0, 0, lo, hi, payload)
        self.roots.append(root)
        return root

    def remove(self, version: int, lo: int, hi: int) -> int:
        self._check_interval(lo, hi)
        self._created_last = 0
        root = self._update(version, 0, 0, lo, hi, 0)
        self.roots.append(root)
        return root

    @property
    def nodes_created_last(self) -> int:
        return self._created_last

    def _update(self, node: int, base: int, depth: int, lo: int, hi: int, payload: int) -> int:
        pool = self._pool
        stride = self._stride
        nid = len(pool) // stride
        pool.extend(pool[node * stride : (node + 1) * stride])
        self._created_last += 1
        span = self._span[depth]
        if lo <= base and base + span - 1 <= hi:
            if payload == 0 and debug_checks() and pool[nid * stride] == 0:
                raise ContractViolation(
                    f"remove of [{lo},{hi}] hits an unmarked canonical node"
                )
            pool[nid * stride] = payload
            return nid
        csp = span // self.k
        off = nid * stride + 1
        old_off = node * stride + 1
        cb = base
        for c in range(self.k):
            if cb <= hi and cb + csp - 1 >= lo:
                pool[off + c] = self._update(pool[old_off + c], cb, depth + 1, lo, hi, payload)
            cb += csp
        return nid

    def payload_at(self, version: int, y: int) -> int:
        """Payload of the unique marked node on the path (0 if none). When the
        caller's intervals are not disjoint, the shallowest mark wins."""
        found, _ = self.member_with_path(version, y)
        return found

    def member(self, version: int, y: int) -> bool:
        return self.payload_at(version, y) != 0

    def member_with_path(self, version: int, y: int) -> tuple[int, int]:
        """(payload, nodes visited); always visits exactly h+1 nodes."""
        if not 0 <= y < self.universe:
            raise BoundsError(f"y={y} outside [0,{self.universe})")
        pool = self._pool
        stride = self._stride
        k = self.k
        node = version
        found = 0
        visited = 0
        for depth in range(self.h):
            visited += 1
            p = pool[node * stride]
            if p and not found:
                found = p
            node = pool[node * stride + 1 + (y // self._span[depth + 1]) % k]
        visited += 1
        p = pool[node * stride]
        if p and not found:
            found = p
        return found, visited


def ktree_insert(tree: PersistentKTree, version: int, interval: tuple[int, int]) -> int:
    return tree.insert(version, interval[0], interval[1])


def ktree_remove(tree: PersistentKTree, version: int, interval: tuple[int, int]) -> int:
    return tree.remove(version, interval[0], interval[1])


def ktree_member(tree: PersistentKTree, version: int, y: int) -> bool:
    return tree.member(version, y)


class PointLocator:
    """Point location over interior-disjoint rectangles with integer corners.

    Rectangles are half-open ``[x1, x2) x [y1, y2)``; a point on a shared
    edge belongs to the rectangle on its right/top. One tree version is
    stored per ``x`` in ``[0, universe]``.
    """

    def __init__(self, rects, payloads, universe: int, epsilon: float = 0.5):
        if len(rects) != len(payloads):
            raise BoundsError("rects and payloads must have equal length")
        if not 0 < epsilon <= 2:
            raise BoundsError(f"need 0 < epsilon <= 2, got {epsilon}")
        self.universe = universe
        h = math.ceil(2.0 / epsilon) + 1
        self.h = h
        self.k = _pick_k(universe + 1, h)
        self.tree = PersistentKTree(self.k, h)
        events = []  # (x, phase, y1, y2_incl, payload_index); removals first
        for idx, (x1, x2, y1, y2) in enumerate(rects):
            if not (0 <= x1 < x2 <= universe and 0 <= y1 < y2 <= universe):
                raise BoundsError(f"rectangle {(x1, x2, y1, y2)} outside [0,{universe}]")
            events.append((x1, 1, y1, y2 - 1, idx))
            events.append((x2, 0, y1, y2 - 1, idx))
        events.sort(key=lambda e: (e[0], e[1]))
        self._payloads = list(payloads)
        ver = []
        root = 0
        active: list[tuple[int, int]] = []  # disjoint inclusive y-intervals
        ei = 0
        for x in range(universe + 1):
            while ei < len(events) and events[ei][0] == x:
                _, phase, y1, y2, idx = events[ei]
                ei += 1
                if phase == 0:
                    del active[bisect_left(active, (y1, y2))]
                    root = self.tree.remove(root, y1, y2)
                else:
                    pos = bisect_left(active, (y1, y2))
                    if pos > 0 and active[pos - 1][1] >= y1:
                        raise OverlapError(f"rectangles overlap at x={x}")
                    if pos < len(active) and active[pos][0] <= y2:
                        raise OverlapError(f"rectangles overlap at x={x}")
                    active.insert(pos, (y1, y2))
                    root = self.tree.insert(root, y1, y2, idx + 1)
            ver.append(root)
        self._ver = ver

    def locate(self, x: int, y: int):
        """Payload of the rectangle containing (x, y), or None."""
        if not (0 <= x <= self.universe and 0 <= y <= self.universe):
            raise BoundsError(f"point ({x},{y}) outside [0,{self.universe}]")
        if y == self.universe:
            return None  # half-open in y
        p = self.tree.payload_at(self._ver[x], y)
        return None if p == 0 else self._payloads[p - 1]

    def query_path_nodes(self) -> int:
        """Tree nodes visited by one query; always h+1."""
        _, visited = self.tree.member_with_path(self._ver[0], 0)
        return visited

    def logical_bits(self) -> int:
        """Node pool plus the per-x version table under id-width accounting."""
        w = max(1, (self.tree.node_count - 1).bit_length())
        return self.tree.logical_bits() + (self.universe + 1) * w


def build_point_locator(rects, payloads, universe: int, epsilon: float = 0.5) -> PointLocator:
    return PointLocator(rects, payloads, universe, epsilon)


class RangeEmptiness:
    """Static orthogonal range emptiness: segment tree over the x-sorted
    points, each node holding the sorted y values of its index range."""

    _LEAF = 8

    def __init__(self, points):
        pts = sorted(points)
        self._xs = [p[0] for p in pts]
        self._ys = [p[1] for p in pts]
        self._lo: list[int] = []
        self._hi: list[int] = []
        self._sorted: list[list[int]] = []
        self._left: list[int] = []
        self._right: list[int] = []
        if pts:
            self._build(0, len(pts))

    def _build(self, lo: int, hi: int) -> int:
        nid = len(self._lo)
        self._lo.append(lo)
        self._hi.append(hi)
        self._sorted.append(sorted(self._ys[lo:hi]))
        self._left.append(-1)
        self._right.append(-1)
        if hi - lo > self._LEAF:
            mid = (lo + hi) // 2
            self._left[nid] = self._build(lo, mid)
            self._right[nid] = self._build(mid, hi)
        return nid

    def empty(self, x1: int, x2: int, y1: int, y2: int) -> bool:
        """True iff no stored point lies in the closed rectangle."""
        if x1 > x2 or y1 > y2 or not self._xs:
            return True
        qlo = bisect_left(self._xs, x1)
        qhi = bisect_left(self._xs, x2 + 1)
        if qlo >= qhi:
            return True
        return self._empty(0, qlo, qhi, y1, y2)

    def _empty(self, nid: int, qlo: int, qhi: int, y1: int, y2: int) -> bool:
        lo, hi = self._lo[nid], self._hi[nid]
        if qhi <= lo or hi <= qlo:
            return True
        if qlo <= lo and hi <= qhi:
            ys = self._sorted[nid]
            i = bisect_left(ys, y1)
            return not (i < len(ys) and ys[i] <= y2)
        if self._left[nid] < 0:
            ys = self._ys
            for i in range(max(lo, qlo), min(hi, qhi)):
                if y1 <= ys[i] <= y2:
                    return False
            return True
        return self._empty(self._left[nid], qlo, qhi, y1, y2) and self._empty(
            self._right[nid], qlo, qhi, y1, y2
        )


def range_empty(re: RangeEmptiness, x1: int, x2: int, y1: int, y2: int) -> bool:
    return re.empty(x1, x2, y1, y2)


class _CountTrie:
    """Path-copied k-ary trie over integer keys with per-node subtree counts
    and a payload slot at the leaves. Supports successor queries."""

    def __init__(self, k: int, h: int):
        self.k = k
        self.h = h
        self.universe = k**h
        self._stride = k + 2  # [count, payload, children...]
        self._pool = array("i", [0] * self._stride)
        self._span = [k ** (h - d) for d in range(h + 1)]

    @property
    def node_count(self) -> int:
        return len(self._pool) // self._stride

    def _path(self, root: int, y: int):
        pool, stride, k = self._pool, self._stride, self.k
        nodes = [root]
        for depth in range(self.h):
            nodes.append(pool[nodes[-1] * stride + 2 + (y // self._span[depth + 1]) % k])
        return nodes

    def _copy_path(self, root: int, y: int, delta: int, payload: int) -> int:
        pool, stride, k = self._pool, self._stride, self.k
        olds = self._path(root, y)
        new_ids = []
        for node in olds:
            nid = len(pool) // stride
            pool.extend(pool[node * stride : (node + 1) * stride])
            pool[nid * stride] += delta
            new_ids.append(nid)
        for depth in range(self.h):
            digit = (y // self._span[depth + 1]) % k
            pool[new_ids[depth] * stride + 2 + digit] = new_ids[depth + 1]
        leaf = new_ids[-1]
        pool[leaf * stride + 1] = payload
        return new_ids[0]

    def insert(self, root: int, y: int, payload: int) -> int:
        if debug_checks() and self._pool[self._path(root, y)[-1] * self._stride] != 0:
            raise ContractViolation(f"duplicate key {y} in one version")
        return self._copy_path(root, y, +1, payload)

    def remove(self, root: int, y: int) -> int:
        if debug_checks() and self._pool[self._path(root, y)[-1] * self._stride] == 0:
            raise ContractViolation(f"remove of absent key {y}")
        return self._copy_path(root, y, -1, 0)

    def successor(self, root: int, y: int):
        """Smallest key >= y with positive count; returns (key, payload)."""
        pool, stride, k = self._pool, self._stride, self.k
        if pool[root * stride] == 0:
            return None
        digits = [(y // self._span[d + 1]) % k for d in range(self.h)]
        node = root
        stack = []
        depth = 0
        while depth < self.h:
            d = digits[depth]
            stack.append((node, d, depth))
            nxt = pool[node * stride + 2 + d]
            if nxt == 0 or pool[nxt * stride] == 0:
                break
            node = nxt
            depth += 1
        else:
            return y, pool[node * stride + 1]
        while stack:
            node, d, depth = stack.pop()
            base = node * stride + 2
            for d2 in range(d + 1, k):
                c = pool[base + d2]
                if c and pool[c * stride] > 0:
                    # Descend to the minimum of this subtree.
                    digs = digits[:depth] + [d2]
                    cur = c
                    for _ in range(depth + 1, self.h):
                        b2 = cur * stride + 2
                        for d3 in range(k):
                            cc = pool[b2 + d3]
                            if cc and pool[cc * stride] > 0:
                                digs.append(d3)
                                cur = cc
                                break
                    val = 0
                    for dd, dig in enumerate(digs):
                        val += dig * self._span[dd + 1]
                    return val, pool[cur * stride + 1]
        return None


class RayShooter:
    """Vertical ray shooting among horizontal segments with closed integer
    x-spans. One trie version per x; at any single x the active segments must
    have pairwise distinct heights (ordered-map contract, asserted under
    TWINMAT_DEBUG=1)."""

    def __init__(self, segments, x_max: int, y_max: int, h: int = 5):
        # segments: iterable of (y, x1, x2, payload), active for x1 <= x <= x2
        self.x_max = x_max
        self.y_max = y_max
        k = _pick_k(y_max + 1, h)
        self._trie = _CountTrie(k, h)
        self._payloads = []
        events = []  # (x, phase, y, payload_index); removals (0) first
        for y, x1, x2, payload in segments:
            if not (0 <= x1 <= x2 <= x_max and 0 <= y <= y_max):
                raise BoundsError(f"segment {(y, x1, x2)} outside universe")
            idx = len(self._payloads)
            self._payloads.append(payload)
            events.append((x1, 1, y, idx))
            events.append((x2 + 1, 0, y, idx))
        events.sort(key=lambda e: (e[0], e[1]))
        ver = []
        root = 0
        ei = 0
        for x in range(x_max + 1):
            while ei < len(events) and events[ei][0] == x:
                _, phase, y, idx = events[ei]
                ei += 1
                if phase == 0:
                    root = self._trie.remove(root, y)
                else:
                    root = self._trie.insert(root, y, idx + 1)
            ver.append(root)
        self._ver = ver

    @property
    def node_count(self) -> int:
        return self._trie.node_count

    def logical_bits(self) -> int:
        """Node pool plus the per-x version table under id-width accounting."""
        nodes = self._trie.node_count
        w = max(1, (nodes - 1).bit_length())
        return nodes * (self._trie.k + 2) * w + (self.x_max + 1) * w

    def ray_shoot(self, x: int, y: int):
        """Lowest segment with height >= y whose x-span covers x, as a
        (height, payload) pair, or None."""
        if not (0 <= x <= self.x_max and 0 <= y <= self.y_max):
            raise BoundsError(f"query ({x},{y}) outside universe")
        hit = self._trie.successor(self._ver[x], y)
        if hit is None:
            return None
        yy, pidx = hit
        return yy, self._payloads[pidx - 1]

    def seg_intersect_empty(self, x: int, y1: int, y2: int) -> bool:
        """True iff the vertical segment x, y in [y1, y2] crosses no stored
        horizontal segment."""
        hit = self.ray_shoot(x, y1)
        return hit is None or hit[0] > y2


def ray_shoot(rs: RayShooter, x: int, y: int):
    return rs.ray_shoot(x, y)


def seg_intersect_empty(rs: RayShooter, x: int, y1: int, y2: int) -> bool:
    return rs.seg_intersect_empty(x, y1, y2)
