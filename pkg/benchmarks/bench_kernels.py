#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Times the four hot kernels on fixed workloads, plus one end-to-end grid
roundtrip per backend.  Run from a built checkout:

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import random
import time

from mvchain import _corepy

try:
    from mvchain import _core
except ImportError:
    _core = None

Q = 2**31 - 1


def _best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def kernel_workloads(rng):
    n = 48
    a = [rng.randrange(Q) for _ in range(n * n)]
    b = [rng.randrange(Q) for _ in range(n * n)]
    vec = [rng.randrange(Q) for _ in range(4096)]
    points = rng.sample(range(Q), 64)
    vdata = [rng.randrange(Q) for _ in range(64 * 256)]
    rmat = [rng.randrange(Q) for _ in range(96 * 96)]

    def bench(impl):
        out = {}
        out["mat_mul 48x48x48"] = lambda: impl.mat_mul(a, b, n, n, n, Q)

        def _scaled():
            acc = [0] * 4096
            for _ in range(32):
                impl.add_scaled(acc, vec, 12345, Q)

        out["add_scaled 32x4096"] = _scaled

        def _horner():
            acc = list(vec)
            for _ in range(32):
                impl.horner_step(acc, vec, 98765, Q)

        out["horner 32x4096"] = _horner
        out["vandermonde 64x256"] = lambda: impl.vandermonde_solve_inplace(
            points, list(vdata), 64, 256, 0, Q
        )
        out["rref 96x96"] = lambda: impl.rref(rmat, 96, 96, Q)
        return out

    return bench


def roundtrip(seed):
    # One full mv2 grid decode at m=3, p=2, 8x8 matrices.
    import mvchain.kernels  # noqa: F401  (backend already selected at import)
    from mvchain.chain_core import (
        PartitionScheme,
        assemble_result,
        oracle_chain_multiply,
        partition,
        random_chain_matrices,
    )
    from mvchain.fp_field import PrimeField
    from mvchain.mv_decoding import extract_mv2, interpolate_grid
    from mvchain.mv_encoding import SchemeKind, evaluate_on_grid
    from mvchain.placement import plan_grid, plan_shared

    field = PrimeField()
    scheme = PartitionScheme((8, 8, 8, 8), (2, 2, 2, 2))
    rng = random.Random(seed)
    matrices = random_chain_matrices(field, scheme, rng)
    chain = partition(matrices, scheme.parts)
    plan = plan_shared(SchemeKind.MV2, scheme, field, seed=seed)
    grid = plan_grid(plan)
    tensor = interpolate_grid(grid, evaluate_on_grid(chain, SchemeKind.MV2, grid.axes))
    assert assemble_result(extract_mv2(tensor, scheme)) == oracle_chain_multiply(matrices)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = [("python", _corepy)]
    if _core is not None:
        backends.insert(0, ("c", _core))
    else:
        print("compiled extension not built; timing pure backend only\n")

    rng = random.Random(0)
    bench = kernel_workloads(rng)
    results = {name: bench(impl) for name, impl in backends}
    names = list(next(iter(results.values())))

    width = max(len(n) for n in names) + 2
    header = f"{'kernel':<{width}}" + "".join(f"{n:>12}" for n, _ in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for name in names:
        times = [_best_of(results[b][name], args.repeat) for b, _ in backends]
        line = f"{name:<{width}}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times)
        if len(times) == 2 and times[0] > 0:
            line += f"{times[1] / times[0]:>9.1f}x"
        print(line)

    t0 = time.perf_counter()
    roundtrip(seed=1)
    print(f"\nmv2 grid roundtrip (m=3, p=2, 8x8): {time.perf_counter() - t0:.3f}s "
          f"[active backend: {__import__('mvchain').BACKEND}]")
    print("set MVCHAIN_PURE_PYTHON=1 to force the fallback for the roundtrip")


if __name__ == "__main__":
    main()
