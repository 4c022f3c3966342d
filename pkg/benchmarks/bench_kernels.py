"""Benchmark the compiled kernels against the pure-Python twins.

Runs the three hot kernels on representative workloads and prints a table
with per-backend timings and the speedup.  Results from both backends are
cross-checked for equality while timing.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

from cig import _core_py
from cig.digraphs import Digraph, cayley
from cig.groups import FiniteGroup
from cig.iso import _candidates, _refine_colors, _search_order
from cig.perms import symmetric_group

try:
    from cig import _core
except ImportError:
    _core = None


def _iso_inputs(d: Digraph):
    colors = _refine_colors(d, [0] * d.order)
    order = _search_order(colors)
    cand = _candidates(order, colors, colors)
    return d.order, list(d.out_masks), list(d.out_masks), order, cand, True


def workloads():
    s8 = [g.images for g in symmetric_group(8).generators]
    k8 = Digraph.complete(8)
    circulant = cayley(FiniteGroup.cyclic(12), {1, 3, 4, 9, 11})
    twin_corpus = [
        Digraph(4, [(code >> (u * 4)) & 15 for u in range(4)])
        for code in range(0, 1 << 16, 7)
    ]

    yield (
        "perm_closure S8 (40320 elements)",
        lambda backend: backend.perm_closure(8, s8, 10**6),
    )
    k8_args = _iso_inputs(k8)
    yield (
        "aut enumeration K8 (40320 leaves)",
        lambda backend: backend.iso_backtrack(*k8_args),
    )
    circ_args = _iso_inputs(circulant)
    yield (
        "aut enumeration circulant-12",
        lambda backend: backend.iso_backtrack(*circ_args),
    )

    def twin_sweep(backend):
        out = 0
        for d in twin_corpus:
            out ^= backend.twin_labels(4, list(d.out_masks), True)[-1]
        return out

    yield ("twin labels, 9363 4-vertex digraphs", twin_sweep)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    backends = [("python", _core_py)]
    if _core is not None:
        backends.insert(0, ("compiled", _core))
    else:
        print("note: compiled kernel not available; timing pure Python only")

    width = 44
    header = f"{'workload':<{width}}" + "".join(
        f"{name:>12}" for name, _ in backends
    )
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for label, run in workloads():
        times = []
        results = []
        for _, backend in backends:
            best = min(
                _timed(run, backend) for _ in range(max(1, args.repeat))
            )
            times.append(best)
            results.append(run(backend))
        if len(results) == 2:
            assert results[0] == results[1], f"backend mismatch on {label}"
        row = f"{label:<{width}}" + "".join(f"{t:>11.3f}s" for t in times)
        if len(times) == 2:
            row += f"{times[1] / times[0]:>9.1f}x"
        print(row)


def _timed(run, backend) -> float:
    start = time.perf_counter()
    run(backend)
    return time.perf_counter() - start


if __name__ == "__main__":
    main()
