#!/usr/bin/env python3
"""Times the compiled Q-network kernels against the numpy fallback.

Shapes mirror real training: default-domain state vectors (228 wide), hidden
width 80, and the small batches the replay loop uses.

    python benchmarks/bench_qnet.py
"""

import time

import numpy as np

from dialogsim.rl import _qnet_np

try:
    from dialogsim.rl import _qnetc
except ImportError:
    _qnetc = None


def bench(module, batch, input_dim=228, hidden=80, actions=57, repeats=2000):
    rng = np.random.default_rng(0)
    w1 = rng.normal(size=(input_dim, hidden))
    b1 = np.zeros(hidden)
    w2 = rng.normal(size=(hidden, actions))
    b2 = np.zeros(actions)
    x = np.ascontiguousarray(rng.random(size=(batch, input_dim)))
    acts = np.ascontiguousarray(rng.integers(0, actions, size=batch))
    targets = rng.normal(size=batch)

    module.forward(w1, b1, w2, b2, x)  # warm up
    start = time.perf_counter()
    for _ in range(repeats):
        module.forward(w1, b1, w2, b2, x)
    fwd = (time.perf_counter() - start) / repeats

    module.loss_and_grads(w1, b1, w2, b2, x, acts, targets)
    start = time.perf_counter()
    for _ in range(repeats):
        module.loss_and_grads(w1, b1, w2, b2, x, acts, targets)
    bwd = (time.perf_counter() - start) / repeats
    return fwd, bwd


def main():
    print(f"{'batch':>6} {'kernel':>8} {'forward':>12} {'loss+grads':>12}")
    for batch in (1, 16, 64):
        rows = [("numpy", _qnet_np)]
        if _qnetc is not None:
            rows.append(("cython", _qnetc))
        times = {}
        for name, module in rows:
            fwd, bwd = bench(module, batch)
            times[name] = (fwd, bwd)
            print(f"{batch:>6} {name:>8} {fwd * 1e6:>10.1f}us {bwd * 1e6:>10.1f}us")
        if "cython" in times:
            speedup = times["numpy"][1] / times["cython"][1]
            print(f"{'':>6} {'ratio':>8} {'':>12} {speedup:>11.2f}x")
    if _qnetc is None:
        print("compiled kernel not built; install with `pip install -e .`")


if __name__ == "__main__":
    main()
