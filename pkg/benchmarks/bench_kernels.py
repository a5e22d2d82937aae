"""Compare the compiled and NumPy kernel backends on full NLS runs.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import time

import numpy as np

from nlslab import kernels
from nlslab.channels import ChannelParams, nls_multimode
from nlslab.fock import DensityOperator, FockCutoff, enable_checks
from nlslab.states import StateFamily, build


def cases():
    rng = np.random.default_rng(0)
    yield "W M=3", build(StateFamily.w(3)).density(), ChannelParams.equal(3, 0.5, 0.5, 4.0)
    yield "NOON n=3", build(StateFamily.noon(3)).density(), ChannelParams.equal(2, 0.5, 0.5, 4.0)
    yield "TMSV nmax=12", build(StateFamily.tmsv(0.2, 12)).density(), ChannelParams.equal(2, 0.5, 0.5, 4.0, cutoff=1)
    for dims in [(3, 3, 3), (5, 5, 5), (2, 2, 2, 2, 2, 2)]:
        cut = FockCutoff(tuple(d - 1 for d in dims))
        a = rng.normal(size=(cut.dim, cut.dim)) + 1j * rng.normal(size=(cut.dim, cut.dim))
        rho = DensityOperator(a @ a.conj().T / np.trace(a @ a.conj().T).real, cut)
        params = ChannelParams.equal(len(dims), 0.7, 0.6, 2.0)
        yield f"random dims={dims}", rho, params


def timed(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    enable_checks(False)
    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled backend not available; build with `pip install -e . --no-build-isolation`")
    print(f"{'case':28s} {'dim':>5s} " + " ".join(f"{b + ' [ms]':>14s}" for b in backends) + "  speedup  max|diff|")
    for name, rho, params in cases():
        times, outs = [], []
        for b in backends:
            prev = kernels.use_backend(b)
            try:
                t, out = timed(lambda: nls_multimode(rho, params), args.repeat)
            finally:
                kernels.use_backend(prev)
            times.append(t)
            outs.append(out.matrix)
        diff = max(float(np.max(np.abs(o - outs[0]))) for o in outs)
        speed = times[backends.index("python")] / times[0] if len(backends) > 1 else 1.0
        cells = " ".join(f"{1e3 * t:14.3f}" for t in times)
        print(f"{name:28s} {rho.cutoff.dim:5d} {cells}  {speed:7.2f}  {diff:.1e}")


if __name__ == "__main__":
    main()
