"""Time the compiled kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeats N]

Reports the median wall time per call for im2col, col2im, sum-tree
updates and lookups, and one full DDQN training step with each backend
patched in. The last column is the speed-up of the compiled path.
"""
import argparse
import statistics
import time
from contextlib import contextmanager

import numpy as np

from tsrl import _pykernels, kernels, nn, qnet, replay
from tsrl.agent import Agent, AgentConfig
from tsrl.replay import PERConfig, Transition


def timeit(fn, repeats):
    fn()
    times = []
    for _ in range(repeats):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return statistics.median(times)


@contextmanager
def backend(module):
    """Route nn and replay through ``module`` for the duration of the block."""
    saved = nn.kernels, replay.kernels
    nn.kernels = replay.kernels = module
    try:
        yield
    finally:
        nn.kernels, replay.kernels = saved


def cases():
    rng = np.random.default_rng(0)
    x = rng.standard_normal((128, 1, 32, 32)).astype(np.float32)
    x2 = rng.standard_normal((128, 16, 15, 15)).astype(np.float32)
    cols2 = _pykernels.im2col(x2, 5, 5, 2)
    tree = np.zeros(2 * 65536)
    leaves = rng.integers(0, 50_000, 32)
    prios = rng.uniform(0, 2, 32)
    _pykernels.sumtree_set(tree, rng.integers(0, 50_000, 50_000), rng.uniform(0, 2, 50_000))
    values = rng.uniform(0, tree[1], 32)
    return [
        ("im2col conv1 (128x1x32x32, k4 s2)", lambda k: k.im2col(x, 4, 4, 2)),
        ("im2col conv2 (128x16x15x15, k5 s2)", lambda k: k.im2col(x2, 5, 5, 2)),
        ("col2im conv2", lambda k: k.col2im(cols2, 128, 16, 15, 15, 5, 5, 2)),
        ("sumtree_set 32 leaves", lambda k: k.sumtree_set(tree, leaves, prios)),
        ("sumtree_find 32 values", lambda k: k.sumtree_find(tree, values)),
    ]


def train_step_case():
    agent = Agent(qnet.NetworkConfig(variant="tsrl"), AgentConfig(), PERConfig(capacity=4096), seed=0)
    rng = np.random.default_rng(1)
    for i in range(512):
        s = (rng.random((4, 32, 32)) < 0.02).astype(np.float32)
        agent.replay.push(Transition(s, i % 3, 0.0, s, False))
    return agent.train_step


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeats", type=int, default=50)
    args = p.parse_args(argv)
    if "compiled" not in kernels.BACKENDS:
        print("compiled extension not built; only the python backend is available")
    names = list(kernels.BACKENDS)
    print(f"{'kernel':<40}" + "".join(f"{n + ' (ms)':>16}" for n in names) + f"{'speed-up':>10}")
    rows = [(label, lambda k, f=f: f(k)) for label, f in cases()]
    step = train_step_case()
    rows.append(("DDQN train step (TSRL, batch 32)", None))
    for label, fn in rows:
        t = {}
        for n in names:
            mod = kernels.BACKENDS[n]
            if fn is None:
                with backend(mod):
                    t[n] = timeit(step, max(args.repeats // 5, 3))
            else:
                t[n] = timeit(lambda: fn(mod), args.repeats)
        speed = f"{t['python'] / t['compiled']:.2f}x" if "compiled" in t else "-"
        print(f"{label:<40}" + "".join(f"{1e3 * t[n]:>16.3f}" for n in names) + f"{speed:>10}")


if __name__ == "__main__":
    main()
