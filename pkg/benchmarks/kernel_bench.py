"""Benchmark the compiled kernels against the pure-numpy fallback.

Two views:

* micro: raw kernel calls on a GHZ-test-sized amplitude vector (both backends
  in one process);
* end-to-end: seeded GHZ-test shot loops, each backend in a subprocess with
  ``CAVITYGHZ_KERNELS`` forced, since the backend is fixed at import time.

Usage: python benchmarks/kernel_bench.py [--shots 2000] [--micro-only]
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from cavityghz import _kernels_py

try:
    from cavityghz import _kernels
except ImportError:
    _kernels = None


def time_call(fn, *args, repeat=2000):
    start = time.perf_counter()
    for _ in range(repeat):
        fn(*args)
    return (time.perf_counter() - start) / repeat


def micro_bench():
    pre, mid, dim = 2, 4, 64  # four atoms + field at the acceptance scale
    size = pre * 2 * mid * dim
    rng = np.random.default_rng(0)
    amps = rng.normal(size=size) + 1j * rng.normal(size=size)
    amps = (amps / np.linalg.norm(amps)).astype(np.complex128)
    s = 1 / np.sqrt(2)
    phases = np.exp(1j * np.arange(dim)).astype(np.complex128)
    theta = rng.uniform(0, 2 * np.pi, dim - 1)
    uaa = np.cos(theta).astype(np.complex128)
    uab = (-1j * np.sin(theta)).astype(np.complex128)

    cases = [
        ("apply_two_level", lambda k, a: k.apply_two_level(a, pre, mid * dim, s, s, -s, s)),
        ("apply_photon_phase", lambda k, a: k.apply_photon_phase(a, pre, mid, dim, 0, phases)),
        ("apply_jc_pair", lambda k, a: k.apply_jc_pair(a, pre, mid, dim, uaa, uab, uab, uaa)),
        ("branch_probability", lambda k, a: k.branch_probability(a, pre, mid * dim, 0)),
        ("collapse_two_level", lambda k, a: k.collapse_two_level(a, pre, mid * dim, 0, 1.0)),
    ]
    print(f"-- kernel micro-benchmark ({size} amplitudes) --")
    header = f"{'kernel':22s} {'python us':>10s} {'compiled us':>12s} {'speedup':>8s}"
    print(header)
    for name, call in cases:
        t_py = time_call(call, _kernels_py, amps.copy()) * 1e6
        if _kernels is None:
            print(f"{name:22s} {t_py:10.2f} {'n/a':>12s} {'n/a':>8s}")
        else:
            t_c = time_call(call, _kernels, amps.copy()) * 1e6
            print(f"{name:22s} {t_py:10.2f} {t_c:12.2f} {t_py / t_c:8.1f}x")


_END_TO_END = """
import time
import cavityghz as cg
start = time.perf_counter()
result = cg.run_ghz_test("+", "{mode}", shots={shots}, alpha=2.0, dim=64, seed=7)
elapsed = time.perf_counter() - start
assert result.all_match_qm()
print(f"{{cg.backend_name()}} {{elapsed:.3f}}")
"""


def end_to_end(shots):
    print(f"-- GHZ-test shot loop ({shots} atomic / {shots // 4} hybrid shots) --")
    for mode, n in (("atomic", shots), ("hybrid", shots // 4)):
        timings = {}
        for backend in ("python", "compiled"):
            if backend == "compiled" and _kernels is None:
                continue
            env = dict(os.environ, CAVITYGHZ_KERNELS=backend)
            code = _END_TO_END.format(mode=mode, shots=n)
            out = subprocess.run(
                [sys.executable, "-c", code], env=env, capture_output=True, text=True
            )
            if out.returncode != 0:
                print(out.stderr, file=sys.stderr)
                raise SystemExit(f"{backend} end-to-end run failed")
            name, seconds = out.stdout.split()
            timings[name] = float(seconds)
        line = f"{mode:8s} python {timings['python']:.3f}s"
        if "compiled" in timings:
            line += (
                f"  compiled {timings['compiled']:.3f}s"
                f"  speedup {timings['python'] / timings['compiled']:.2f}x"
            )
        print(line)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--shots", type=int, default=2000)
    parser.add_argument("--micro-only", action="store_true")
    args = parser.parse_args()
    if _kernels is None:
        print("note: compiled kernels not built; showing the fallback only")
    micro_bench()
    if not args.micro_only:
        end_to_end(args.shots)


if __name__ == "__main__":
    main()
