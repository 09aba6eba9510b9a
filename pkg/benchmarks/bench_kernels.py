#!/usr/bin/env python3
"""Compare the pure-Python kernels against the compiled extension.

Times the three hot kernels on generated workloads, checks that both
backends return identical answers while doing so, and prints a table.
Runs fine without the extension built (compiled column shows "-").

    python3 benchmarks/bench_kernels.py --repeat 5
"""

import argparse
import random
import sys
import time

from submine.gen import gnp_graph
from submine.graph import larger_neighbors
from submine.kernels import pure

try:
    from submine.kernels import _fastpath
except ImportError:
    _fastpath = None


def _triangle_workload(seed, graphs=20, n=150, p=0.08):
    """(ids, adj_lists) call pairs shaped like the triangle app's."""
    calls = []
    for s in range(graphs):
        g = gnp_graph(n, p, seed=seed + s)
        for v in g:
            gt = [a.nb for a in larger_neighbors(v)]
            if len(gt) < 2:
                continue
            ids = gt[:-1]
            adj = [[w for w in g[u].neighbor_ids() if w > u] for u in ids]
            calls.append((ids, adj))
    return calls


def _rows_workload(seed, count, n, p):
    """Random symmetric bitset adjacency rows."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        rows = [0] * n
        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < p:
                    rows[i] |= 1 << j
                    rows[j] |= 1 << i
        out.append(rows)
    return out


def _time(fn, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def bench_count_closing_pairs(args):
    calls = _triangle_workload(args.seed)

    def run(mod):
        return sum(mod.count_closing_pairs(ids, adj) for ids, adj in calls)

    return len(calls), run


def bench_max_clique(args):
    n = 60
    workload = _rows_workload(args.seed, 30, n, 0.5)

    def run(mod):
        return [mod.max_clique(n, rows) for rows in workload]

    return len(workload), run


def bench_maximal_cliques(args):
    n = 34
    workload = _rows_workload(args.seed + 1, 20, n, 0.4)
    full = (1 << n) - 1

    def run(mod):
        return [sorted(mod.maximal_cliques(n, rows, full, 0))
                for rows in workload]

    return len(workload), run


BENCHES = [
    ("count_closing_pairs", bench_count_closing_pairs),
    ("max_clique", bench_max_clique),
    ("maximal_cliques", bench_maximal_cliques),
]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3,
                    help="timing repetitions; best of N is reported")
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)

    if _fastpath is None:
        print("note: compiled extension not built; timing pure only",
              file=sys.stderr)

    rows = []
    for name, setup in BENCHES:
        calls, run = setup(args)
        pure_t, pure_out = _time(lambda: run(pure), args.repeat)
        if _fastpath is not None:
            fast_t, fast_out = _time(lambda: run(_fastpath), args.repeat)
            if fast_out != pure_out:
                print(f"error: backends disagree on {name}", file=sys.stderr)
                return 1
            rows.append((name, calls, f"{pure_t:.4f}", f"{fast_t:.4f}",
                         f"{pure_t / fast_t:.1f}x"))
        else:
            rows.append((name, calls, f"{pure_t:.4f}", "-", "-"))

    header = ("kernel", "calls", "pure_s", "compiled_s", "speedup")
    widths = [max(len(str(r[i])) for r in rows + [header])
              for i in range(len(header))]
    for r in [header] + rows:
        print("  ".join(str(f).ljust(w) for f, w in zip(r, widths)))
    return 0


if __name__ == "__main__":
    sys.exit(main())
