"""Command-line surface: corpus generation, oracle build/query/verify,
micro-benchmarks, and debug dumps.

Machine-readable output is one JSON object per line on stdout; progress and
notes go to stderr. Set TWINMAT_DEBUG=1 to enable internal invariant checks.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from . import compact, twinorder
from .errors import BoundsError, TwinmatError
from .geom import PointLocator
from .matrix import RectangleDecomposition, realize
from .subtypes import build_types_oracle
from .zoneapprox import zone_approximation


@dataclass(frozen=True)
class Config:
    beta: float = 1.0
    epsilon: float = 0.5
    seed: int = 0
    accounting: str = "packed"

    def validate(self) -> None:
        if self.beta <= 0:
            raise BoundsError(f"--beta must be positive, got {self.beta}")
        if not 0 < self.epsilon <= 2:
            raise BoundsError(f"--epsilon must be in (0, 2], got {self.epsilon}")


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")


def _note(msg: str) -> None:
    sys.stderr.write(msg + "\n")


def _load_dec(path: str) -> RectangleDecomposition:
    return RectangleDecomposition.parse(Path(path).read_text())


def _load_oracle(path: str) -> compact.CompactOracle:
    return compact.deserialize(Path(path).read_bytes())


def cmd_gen(args) -> int:
    cfg = Config(seed=args.seed)
    cfg.validate()
    m, seq = twinorder.generate(args.n, args.d, args.seed, args.divergence)
    ok, max_err = twinorder.verify_sequence(m, seq, args.d)
    dec = twinorder.extract_decomposition(m, seq)
    bound = args.d * (2 * args.n - 2) + 1
    Path(args.out_dec).write_text(dec.dump())
    if args.out_seq:
        Path(args.out_seq).write_text(seq.dump())
    if args.out_matrix:
        Path(args.out_matrix).write_text(m.to_literal().replace(";", "\n") + "\n")
    _emit(
        {
            "type": "gen",
            "n": args.n,
            "d": args.d,
            "seed": args.seed,
            "rects": len(dec.rects),
            "rect_bound": bound,
            "verified": ok,
            "max_error": max_err,
        }
    )
    return 0 if ok and len(dec.rects) <= bound else 1


def cmd_build(args) -> int:
    cfg = Config(beta=args.beta, epsilon=args.epsilon, accounting=args.accounting)
    cfg.validate()
    dec = _load_dec(args.dec)
    t0 = time.perf_counter()
    oracle = compact.build(dec, beta=args.beta, epsilon=args.epsilon)
    wall_ms = (time.perf_counter() - t0) * 1e3
    Path(args.out).write_bytes(compact.serialize(oracle))
    report = compact.bitsize(oracle, args.accounting)
    _emit(
        {
            "type": "build_stats",
            "n": oracle.n_original,
            "n_padded": oracle.n_padded,
            "beta": oracle.beta,
            "ell": oracle.ell,
            "m": list(oracle.schedule.levels),
            "families": list(oracle.counts),
            "accounting": report.accounting,
            "total_bits": report.total_bits,
            "bits_per_n": report.bits_per_n,
            "wall_ms": wall_ms,
        }
    )
    return 0


def cmd_query(args) -> int:
    oracle = _load_oracle(args.oracle)
    bit, hops = compact.query_with_hops(oracle, args.i, args.j)
    sys.stdout.write(f"{bit} hops={hops}\n")
    return 0


def cmd_verify(args) -> int:
    oracle = _load_oracle(args.oracle)
    dec = _load_dec(args.dec)
    m = realize(dec)
    if m.n != oracle.n_original:
        _emit({"type": "verify", "equal": False, "reason": "size mismatch"})
        return 1
    n = m.n
    for i in range(1, n + 1):
        row = m.a[i - 1]
        for j in range(1, n + 1):
            if compact.query(oracle, i, j) != int(row[j - 1]):
                _emit({"type": "verify", "equal": False, "i": i, "j": j})
                return 1
        if i % 512 == 0:
            _note(f"verified {i}/{n} rows")
    _emit({"type": "verify", "equal": True, "checked": n * n})
    return 0


def cmd_bench(args) -> int:
    oracle = _load_oracle(args.oracle)
    rng = random.Random(args.seed)
    n = oracle.n_original
    coords = [(rng.randint(1, n), rng.randint(1, n)) for _ in range(args.queries)]
    lat = []
    t_start = time.perf_counter()
    for i, j in coords:
        t0 = time.perf_counter_ns()
        compact.query(oracle, i, j)
        lat.append(time.perf_counter_ns() - t0)
    total_ms = (time.perf_counter() - t_start) * 1e3
    lat.sort()
    _emit(
        {
            "type": "bench",
            "queries": args.queries,
            "seed": args.seed,
            "p50_us": lat[len(lat) // 2] / 1e3,
            "p99_us": lat[min(len(lat) - 1, (len(lat) * 99) // 100)] / 1e3,
            "total_ms": total_ms,
        }
    )
    return 0


def cmd_appendix_bench(args) -> int:
    cfg = Config(epsilon=args.epsilon, seed=args.seed)
    cfg.validate()
    dec = _load_dec(args.dec)
    n = dec.n
    rects = [(r.c1 - 1, r.c2, r.r1 - 1, r.r2) for r in dec.rects]
    t0 = time.perf_counter()
    loc = PointLocator(rects, list(range(len(rects))), universe=n, epsilon=args.epsilon)
    wall_ms = (time.perf_counter() - t0) * 1e3
    depth = loc.query_path_nodes()
    rng = random.Random(args.seed)
    mismatches = 0
    for _ in range(args.samples):
        i, j = rng.randint(1, n), rng.randint(1, n)
        got = loc.locate(j - 1, i - 1) is not None
        want = any(r.contains(i, j) for r in dec.rects)
        if got != want:
            mismatches += 1
    _emit(
        {
            "type": "appendix_bench",
            "n": n,
            "rects": len(rects),
            "epsilon": args.epsilon,
            "h": loc.h,
            "k": loc.k,
            "query_path_nodes": depth,
            "node_pool_bits": loc.tree.logical_bits(),
            "samples": args.samples,
            "mismatches": mismatches,
            "wall_ms": wall_ms,
        }
    )
    return 0 if mismatches == 0 else 1


def cmd_cover_dump(args) -> int:
    cfg = Config(epsilon=args.epsilon)
    cfg.validate()
    dec = _load_dec(args.dec)
    oracle = build_types_oracle(dec, args.epsilon)
    zc = zone_approximation(oracle, args.s)
    for el in zc.elements:
        _emit(
            {
                "type": "cover",
                "tag": el.tag.value,
                "rows": [el.rect.r1, el.rect.r2],
                "cols": [el.rect.c1, el.rect.c2],
            }
        )
    _emit(
        {
            "type": "cover_summary",
            "s": args.s,
            "elements": len(zc.elements),
            "oracle_bits": oracle.structure_bits(),
        }
    )
    return 0


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="twinmat")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a matrix, witness, and decomposition")
    g.add_argument("n", type=int)
    g.add_argument("d", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--divergence", type=float, default=0.5)
    g.add_argument("--out-dec", required=True)
    g.add_argument("--out-seq", default=None)
    g.add_argument("--out-matrix", default=None)
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("build", help="build and serialize a compact oracle")
    b.add_argument("dec")
    b.add_argument("--beta", type=float, default=1.0)
    b.add_argument("--epsilon", type=float, default=0.5)
    b.add_argument("--accounting", choices=("packed", "paper"), default="packed")
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_build)

    q = sub.add_parser("query", help="query one entry of a serialized oracle")
    q.add_argument("oracle")
    q.add_argument("i", type=int)
    q.add_argument("j", type=int)
    q.set_defaults(func=cmd_query)

    v = sub.add_parser("verify", help="compare an oracle against its decomposition")
    v.add_argument("oracle")
    v.add_argument("dec")
    v.set_defaults(func=cmd_verify)

    be = sub.add_parser("bench", help="query latency percentiles")
    be.add_argument("oracle")
    be.add_argument("--queries", type=int, default=10000)
    be.add_argument("--seed", type=int, default=0)
    be.set_defaults(func=cmd_bench)

    ab = sub.add_parser(
        "appendix-bench", help="sweep-based point locator built directly on a decomposition"
    )
    ab.add_argument("dec")
    ab.add_argument("--epsilon", type=float, default=0.5)
    ab.add_argument("--seed", type=int, default=0)
    ab.add_argument("--samples", type=int, default=1000)
    ab.set_defaults(func=cmd_appendix_bench)

    cd = sub.add_parser("cover-dump", help="dump the zone-approximation cover")
    cd.add_argument("dec")
    cd.add_argument("--s", type=int, required=True)
    cd.add_argument("--epsilon", type=float, default=0.5)
    cd.set_defaults(func=cmd_cover_dump)

    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except TwinmatError as exc:
        _note(f"error: {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
