"""Compare the compiled and pure-Python propagation/search kernels.

    python bench/bench_kernels.py [--repeat N] [--subgraphs N]
"""

from __future__ import annotations

import argparse
import itertools
import random
import time

from ksvi.hypergraph import ray_id, table1_hypergraph
from ksvi.kernels import _pykernels

try:
    from ksvi.kernels import _ckernels
except ImportError:
    _ckernels = None


def _best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def workloads(n_sub: int):
    h = table1_hypergraph()
    n, members = len(h.observables), h.encoded
    seeds = [(h.ctx_index["C1"], h.contexts["C1"].members.index(ray_id((1, 0, 0))), 1),
             (h.ctx_index["C2"], h.contexts["C2"].members.index(ray_id((3, 2, 1))), 1)]
    rng = random.Random(0)
    combos = list(itertools.combinations(range(len(members)), 6))
    picks = [combos[i] for i in rng.sample(range(len(combos)), n_sub)]
    subs = []
    for pick in picks:
        sub = h.subgraph([list(h.contexts)[i] for i in pick])
        subs.append((len(sub.observables), sub.encoded))

    def run(backend):
        return {
            "propagate Table I (NC, 2 seeds)": lambda: backend.propagate(n, members, seeds, True),
            "count Table I (NC, seed a=1)": lambda: backend.count(n, members, seeds[:1], True, 10**7),
            "search Table I (contextual)": lambda: backend.search(n, members, [], False),
            f"crosscheck {n_sub} six-context subgraphs (NC)": lambda: [
                backend.crosscheck(sn, sm, True) for sn, sm in subs
            ],
        }

    return run


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--subgraphs", type=int, default=50)
    args = ap.parse_args(argv)
    run = workloads(args.subgraphs)
    py = run(_pykernels)
    c = run(_ckernels) if _ckernels else None
    print(f"{'workload':<44}{'python [ms]':>14}{'compiled [ms]':>16}{'speedup':>10}")
    for name, fn in py.items():
        tp = _best(fn, args.repeat) * 1e3
        if c:
            tc = _best(c[name], args.repeat) * 1e3
            print(f"{name:<44}{tp:>14.3f}{tc:>16.3f}{tp / tc:>9.1f}x")
        else:
            print(f"{name:<44}{tp:>14.3f}{'n/a':>16}{'':>10}")


if __name__ == "__main__":
    main()
