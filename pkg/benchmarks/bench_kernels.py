"""Time the compiled and numpy training kernels on one full-batch epoch.

    python benchmarks/bench_kernels.py [--samples 512] [--repeats 50]

Reports the median wall time per ``batch_loss_grad`` call for each backend
and the largest disagreement between their outputs.
"""
from __future__ import annotations

import argparse
import math
import statistics
import time

import numpy as np

from qnnsim import _kernels_py, qnn
from qnnsim.data import code_table


def make_problem(n_samples, sizes, seed=0):
    rng = np.random.default_rng(seed)
    layers = [rng.uniform(0, 2 * math.pi, (o, i)) for i, o in zip(sizes, sizes[1:])]
    angles = rng.uniform(0, math.pi, (n_samples, sizes[0]))
    targets = np.ascontiguousarray(code_table(2)[rng.integers(0, 2, n_samples)])
    return layers, angles, targets


def time_call(fn, repeats):
    fn()  # warm-up
    times = []
    for _ in range(repeats):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return statistics.median(times)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--samples", type=int, default=512)
    p.add_argument("--repeats", type=int, default=50)
    p.add_argument("--sizes", default="9,10,6,1")
    args = p.parse_args(argv)
    sizes = [int(s) for s in args.sizes.split(",")]
    layers, angles, targets = make_problem(args.samples, sizes)
    backends = {"python": _kernels_py}
    try:
        from qnnsim import _kernels

        backends["cython"] = _kernels
    except ImportError:
        print("compiled extension not built; timing the numpy fallback only")

    outputs, seconds = {}, {}
    for name, impl in backends.items():
        call = lambda impl=impl: impl.batch_loss_grad(layers, angles, targets, qnn.CLAMP_EPS)
        seconds[name] = time_call(call, args.repeats)
        outputs[name] = call()
        print(f"{name:>7}: {seconds[name] * 1e3:8.3f} ms per loss+grad call "
              f"({args.samples} samples, shape {'-'.join(map(str, sizes))})")
    if "cython" in backends:
        (lp, gp), (lc, gc) = outputs["python"], outputs["cython"]
        diff = max(float(np.max(np.abs(a - b))) for a, b in zip(gp, gc))
        print(f"speedup: {seconds['python'] / seconds['cython']:.1f}x; "
              f"max |grad diff| {diff:.2e}; |loss diff| {abs(lp - lc):.2e}")


if __name__ == "__main__":
    main()
