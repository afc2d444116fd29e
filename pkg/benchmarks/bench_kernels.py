"""Benchmark the compiled kernels against the pure-Python fallback.

Micro-benchmarks run both implementations in-process; the end-to-end forge
comparison re-runs in subprocesses with SLOTFORGE_PURE toggled, since the
backend is chosen once at import.

    python benchmarks/bench_kernels.py [--scale 1.0] [--skip-e2e]
"""

import argparse
import os
import subprocess
import sys
import time

from slotforge._kernels import _native

try:
    from slotforge._kernels import _speedups
except ImportError:
    _speedups = None


def timed(fn) -> float:
    start = time.perf_counter()
    fn()
    return time.perf_counter() - start


def bench_stream(impl, n):
    rng = impl.SplitMix64(1)
    def run():
        for _ in range(n):
            rng.next_u64()
    return run


def bench_hash(impl, n):
    keys = [f"c{i:06d}|{i % 12}|42".encode() for i in range(2000)]
    def run():
        for _ in range(n // len(keys)):
            for key in keys:
                impl.fnv1a64(key)
    return run


def bench_draws(impl, n):
    rng = impl.SplitMix64(2)
    labels = [f"label_{i}" for i in range(12)]
    def run():
        for _ in range(n):
            rng.randint(1, 5)
            picked = rng.sample(labels, 4)
            rng.shuffle(picked)
    return run


def bench_containment(impl, n):
    pairs = [
        (["30"], ["30", "euros"]),
        (["a", "b", "c"], ["x", "a", "b", "c", "y"]),
        (["monthly"], ["yearly"]),
        (["m", "n", "o", "p"], ["m", "n", "x", "p"]),
    ]
    def run():
        for _ in range(n // len(pairs)):
            for a, b in pairs:
                impl.token_containment(a, b)
    return run


MICRO = (
    ("splitmix64 stream", bench_stream, 2_000_000),
    ("fnv1a64 seed hash", bench_hash, 2_000_000),
    ("forge-style draws", bench_draws, 200_000),
    ("token containment", bench_containment, 2_000_000),
)

E2E_SNIPPET = """
import time
from slotforge.prompt_forge import ForgeConfig, forge_regular_dataset
from slotforge.synth import synth_corpus
calls = synth_corpus(300, 10, seed=1)
config = ForgeConfig(master_seed=1)
start = time.perf_counter()
forge_regular_dataset(calls, config)
print(time.perf_counter() - start)
"""


def run_e2e(pure: bool) -> float:
    env = dict(os.environ)
    env.pop("SLOTFORGE_PURE", None)
    if pure:
        env["SLOTFORGE_PURE"] = "1"
    out = subprocess.run(
        [sys.executable, "-c", E2E_SNIPPET], env=env, capture_output=True, text=True, check=True
    )
    return float(out.stdout.strip())


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--scale", type=float, default=1.0, help="Work multiplier.")
    parser.add_argument("--skip-e2e", action="store_true")
    args = parser.parse_args()

    if _speedups is None:
        print("compiled kernels unavailable; rebuild without SLOTFORGE_NO_EXT to compare")
        return 1

    width = 24
    print(f"{'benchmark':<{width}} {'native':>10} {'compiled':>10} {'speedup':>8}")
    for name, factory, base_n in MICRO:
        n = max(1, int(base_n * args.scale))
        t_native = timed(factory(_native, n))
        t_fast = timed(factory(_speedups, n))
        print(f"{name:<{width}} {t_native:>9.3f}s {t_fast:>9.3f}s {t_native / t_fast:>7.1f}x")

    if not args.skip_e2e:
        t_native = run_e2e(pure=True)
        t_fast = run_e2e(pure=False)
        print(f"{'forge 3000 examples':<{width}} {t_native:>9.3f}s {t_fast:>9.3f}s "
              f"{t_native / t_fast:>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
