"""Compare the compiled and pure-Python kernels.

Times the raw kernels in-process, then a complete exact simulation under
each backend in a subprocess (the backend is fixed at import time).

    python benchmarks/bench_kernels.py [--repeat N]
"""
from __future__ import annotations

import argparse
import os
import subprocess
import sys
import timeit

from dcmpoles.exact import _pykernels

try:
    from dcmpoles.exact import _ckernels
except ImportError:
    _ckernels = None

A = (0.0, -2e5, 2.5e4, -1250.0, 1e6, 0.0)

SIM_SNIPPET = """
import time
from dcmpoles.exact import BACKEND, sim
from dcmpoles.model import ConverterParams, ResistiveParallelCPL, Topology
from dcmpoles.schemes import OpenLoop
params = ConverterParams(Topology.BOOST, 5.0, 5e-6, 40e-6, 0.05, 1e-5)
t = time.perf_counter()
sim.simulate(OpenLoop(0.7), ResistiveParallelCPL(15.0), params, (0.0, 18.0), {cycles})
print(BACKEND, time.perf_counter() - t)
"""


def bench_kernel(mod, number):
    expm = timeit.timeit(lambda: mod.expm_affine(*A, 3e-6), number=number)
    event = timeit.timeit(
        lambda: mod.find_event(*A, 2.0, 18.0, 1.0, 0.0, 0.0, 0.0, 1e-4, 256, 1e-13), number=number // 10
    )
    return 1e6 * expm / number, 1e6 * event / (number // 10)


def bench_sim(pure, cycles):
    env = dict(os.environ)
    if pure:
        env["DCMPOLES_PURE_PYTHON"] = "1"
    else:
        env.pop("DCMPOLES_PURE_PYTHON", None)
    out = subprocess.run([sys.executable, "-c", SIM_SNIPPET.format(cycles=cycles)], env=env,
                         capture_output=True, text=True, check=True).stdout.split()
    return out[0], float(out[1])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20000)
    ap.add_argument("--cycles", type=int, default=200)
    args = ap.parse_args(argv)

    rows = [("python", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    print(f"{'backend':<8} {'expm_affine (us)':>17} {'find_event (us)':>16}")
    results = {}
    for name, mod in rows:
        results[name] = bench_kernel(mod, args.repeat)
        print(f"{name:<8} {results[name][0]:>17.3f} {results[name][1]:>16.2f}")
    if "cython" in results:
        sp = [p / c for p, c in zip(results["python"], results["cython"])]
        print(f"{'speedup':<8} {sp[0]:>16.1f}x {sp[1]:>15.1f}x")

    print(f"\nexact simulation, CPL load, {args.cycles} cycles")
    times = {}
    for pure in (True, False):
        backend, t = bench_sim(pure, args.cycles)
        times[backend] = t
        print(f"{backend:<8} {t * 1e3:>10.1f} ms")
    if len(times) == 2:
        print(f"{'speedup':<8} {times['python'] / times['cython']:>10.1f}x")


if __name__ == "__main__":
    main()
