"""Time the bitset kernels under each available backend.

    python benchmarks/bench_kernels.py --n 600 --d 300 --repeat 5
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import timeit

from ktfactor import generators
from ktfactor._kernels import available_backends
from ktfactor.graph import to_mask


def workloads(g, rng):
    n = g.n
    half = to_mask(rng.sample(range(n), n // 2))
    other = to_mask(rng.sample(range(n), n // 3))
    small = to_mask(rng.sample(range(n), min(n, 40)))
    return {
        "masked_degrees": lambda k: k.masked_degrees(g, half),
        "edge_count_between": lambda k: k.edge_count_between(g, half, other),
        "best_vertex": lambda k: k.best_vertex(g, half),
        "cliques_in(k=3, limit=2000)": lambda k: k.cliques_in(g, small, 3, 2000),
    }


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=600)
    p.add_argument("--d", type=int, default=300)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--json", action="store_true", help="emit one JSON object per line")
    args = p.parse_args(argv)

    g = generators.random_regular(args.n, args.d, args.seed)
    backends = available_backends()
    jobs = workloads(g, random.Random(args.seed))
    if "cython" not in backends and not args.json:
        print("compiled backend not built; timing the pure-Python kernels only", file=sys.stderr)

    rows = []
    for name, fn in jobs.items():
        times = {}
        for backend, mod in backends.items():
            timer = timeit.Timer(lambda: fn(mod))
            loops, _ = timer.autorange()
            times[backend] = min(timer.repeat(args.repeat, loops)) / loops
        rows.append((name, times))

    for name, times in rows:
        if args.json:
            print(json.dumps({"kernel": name, "n": args.n, "d": args.d, **{k: v for k, v in times.items()}}))
            continue
        parts = [f"{b}={t * 1e6:10.1f} us" for b, t in times.items()]
        if len(times) == 2:
            parts.append(f"speedup={times['python'] / times['cython']:7.1f}x")
        print(f"{name:<28} " + "  ".join(parts))
    return 0


if __name__ == "__main__":
    sys.exit(main())
