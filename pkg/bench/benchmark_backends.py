"""Compare the compiled and pure-Python dynamics kernels.

Times the raw per-state evaluation on random trees and a full closed-loop
five-link run with each backend.  Run as: python bench/benchmark_backends.py
"""

import argparse
import time

import numpy as np

from linksim import five_link_scenario, integrate, node_accelerations
from linksim.dynamics import available_backends, use_backend
from linksim.verify import random_model, random_valid_state


def bench_eval(node_count: int, repeats: int, rng) -> dict[str, float]:
    model = random_model(rng, max_nodes=node_count)
    while model.node_count != node_count:
        model = random_model(rng, max_nodes=node_count)
    state = random_valid_state(model, rng)
    F = rng.normal(0, 2, (node_count, 2))
    out = {}
    for name in available_backends():
        use_backend(name)
        node_accelerations(model, state, F)  # warm up
        start = time.perf_counter()
        for _ in range(repeats):
            node_accelerations(model, state, F)
        out[name] = (time.perf_counter() - start) / repeats
    return out


def bench_five_link(duration: float) -> dict[str, float]:
    out = {}
    for name in available_backends():
        use_backend(name)
        scen = five_link_scenario()
        start = time.perf_counter()
        integrate(scen.model, scen.initial_state, scen.force_law(), duration, 1e-3)
        out[name] = time.perf_counter() - start
    return out


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=2000)
    parser.add_argument("--duration", type=float, default=2.0)
    args = parser.parse_args()

    backends = available_backends()
    if "compiled" not in backends:
        print("note: compiled kernel unavailable, timing pure Python only")

    rng = np.random.default_rng(0)
    print(f"per-state evaluation ({args.repeats} repeats):")
    for n in (4, 8, 16, 32):
        res = bench_eval(n, args.repeats, rng)
        parts = "  ".join(f"{k}: {v*1e6:8.2f} us" for k, v in sorted(res.items()))
        line = f"  n={n:3d}  {parts}"
        if len(res) == 2:
            line += f"  speedup: {res['python'] / res['compiled']:.1f}x"
        print(line)

    print(f"\nfive-link closed-loop run ({args.duration} s, dt=1e-3):")
    res = bench_five_link(args.duration)
    for k, v in sorted(res.items()):
        print(f"  {k}: {v:.3f} s")
    if len(res) == 2:
        print(f"  speedup: {res['python'] / res['compiled']:.2f}x")


if __name__ == "__main__":
    main()
