"""Compare the pure-Python and compiled term kernels.

Micro section: unify / copy_term / compare_terms on a fixed bag of nested
terms, timed in-process for each importable kernel.

End-to-end section: exhausting the graph-coloring benchmark query, timed in
a subprocess per kernel because the implementation is chosen once at import
time (ENTANGLE_PL_KERNEL).

Usage: python benchmarks/bench_kernel.py [--repeat N] [--queries N]
"""

from __future__ import annotations

import argparse
import os
import random
import subprocess
import sys
import time

import entangle_pl._core_py as core_py

try:
    import entangle_pl._core_c as core_c
except ImportError:
    core_c = None

KERNELS = [core_py] + ([core_c] if core_c is not None else [])

_END_TO_END = """
import time
from entangle_pl import Engine, corpus_dir
from entangle_pl.kernel import IMPL

eng = Engine()
eng.consult_text((corpus_dir() / "coloring.pl").read_text(encoding="utf-8"))
best = None
for _ in range({queries}):
    t0 = time.perf_counter()
    n = sum(1 for _ in eng.query("coloring(Vs)."))
    dt = time.perf_counter() - t0
    assert n == 12
    best = dt if best is None else min(best, dt)
print(IMPL, best)
"""


def build_terms(kernel, store, rng, count=200):
    pool = [store.new_var() for _ in range(8)]

    def term(depth=0):
        if depth >= 4 or rng.random() < 0.2:
            leaf = rng.random()
            if leaf < 0.3:
                return rng.choice(pool)
            if leaf < 0.65:
                return kernel.Int(rng.randrange(10))
            return kernel.Atom(rng.choice("abcde"))
        name = rng.choice("fgh")
        return kernel.Struct(
            name, tuple(term(depth + 1) for _ in range(rng.randrange(1, 4)))
        )

    return [term() for _ in range(count)]


def bench_micro(kernel, repeat):
    rng = random.Random(12345)
    store = kernel.Store()
    terms = build_terms(kernel, store, rng)
    # unify each term against a fresh copy of itself (always succeeds),
    # undoing afterwards so iterations stay independent
    mark = store.mark()
    copies = [kernel.copy_term(t, store) for t in terms]
    store.undo_to(mark)

    t0 = time.perf_counter()
    for _ in range(repeat):
        for a, b in zip(terms, copies):
            kernel.unify(a, b, store, False)
            store.undo_to(mark)
    unify_s = time.perf_counter() - t0

    t0 = time.perf_counter()
    for _ in range(repeat):
        for t in terms:
            kernel.copy_term(t, store)
    copy_s = time.perf_counter() - t0

    t0 = time.perf_counter()
    for _ in range(repeat):
        for a, b in zip(terms, copies):
            kernel.compare_terms(a, b)
    compare_s = time.perf_counter() - t0

    ops = repeat * len(terms)
    return {
        "unify": unify_s / ops * 1e6,
        "copy": copy_s / ops * 1e6,
        "compare": compare_s / ops * 1e6,
    }


def bench_end_to_end(impl, queries):
    env = dict(os.environ, ENTANGLE_PL_KERNEL=impl)
    out = subprocess.run(
        [sys.executable, "-c", _END_TO_END.format(queries=queries)],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    reported_impl, seconds = out.stdout.split()
    assert reported_impl == impl, f"subprocess selected kernel {reported_impl!r}"
    return float(seconds) * 1e3


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--repeat", type=int, default=50,
        help="micro-benchmark passes over the term bag (default 50)",
    )
    parser.add_argument(
        "--queries", type=int, default=5,
        help="end-to-end coloring runs per kernel, best is kept (default 5)",
    )
    args = parser.parse_args(argv)

    rows = {}
    for kernel in KERNELS:
        rows[kernel.IMPL] = bench_micro(kernel, args.repeat)
        rows[kernel.IMPL]["coloring"] = bench_end_to_end(kernel.IMPL, args.queries)

    columns = ["unify", "copy", "compare", "coloring"]
    units = {"unify": "us", "copy": "us", "compare": "us", "coloring": "ms"}
    header = "kernel    " + "".join(f"{c:>14}" for c in columns)
    print(header)
    print("-" * len(header))
    for impl, row in rows.items():
        cells = "".join(f"{row[c]:>11.2f} {units[c]}" for c in columns)
        print(f"{impl:<10}{cells}")
    if "py" in rows and "c" in rows:
        cells = "".join(
            f"{rows['py'][c] / rows['c'][c]:>12.1f} x" for c in columns
        )
        print(f"{'speedup':<10}{cells}")
    if core_c is None:
        print("\ncompiled kernel not importable; showing pure Python only")
    return 0


if __name__ == "__main__":
    sys.exit(main())
