"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat N]

Inputs are sized like the built-in experiments: a 100-interface lattice,
a few thousand impulses convolved onto a fine trace, and cumulative
integration of that trace.
"""
import argparse
import time

import numpy as np

from imptransform import _kernels


def best_of(fn, args, repeat):
    fn(*args)  # warm up (and compile)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    rng = np.random.default_rng(0)
    refl = rng.uniform(-0.3, 0.3, 100)
    yield "lattice 100 nodes x 8000 steps", "lattice_response", (refl, 8000)
    times = np.sort(rng.uniform(2.0, 8.0, 2000))
    amps = rng.normal(0, 0.1, 2000)
    w = np.exp(-0.5 * np.linspace(-10, 10, 401) ** 2)
    yield ("convolve 2000 events onto 200k samples", "convolve_events",
           (times, amps, w, -0.5, 0.0025, 0.0, 4e-5, 200_000))
    y = rng.normal(size=800_000)
    yield "cumtrapz 800k samples", "cumtrapz", (y, 1e-5)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not _kernels.HAVE_NUMBA:
        print("numba is not installed; only the numpy kernels are available")
    print(f"{'kernel':42s} {'numpy [s]':>10s} {'numba [s]':>10s} {'speedup':>8s}")
    for label, name, inputs in cases():
        t_np = best_of(getattr(_kernels, name + "_numpy"), inputs, args.repeat)
        if _kernels.HAVE_NUMBA:
            t_nb = best_of(getattr(_kernels, name + "_numba"), inputs, args.repeat)
            a = getattr(_kernels, name + "_numpy")(*inputs)
            b = getattr(_kernels, name + "_numba")(*inputs)
            assert np.allclose(a, b, rtol=0, atol=1e-10), name
            print(f"{label:42s} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:7.1f}x")
        else:
            print(f"{label:42s} {t_np:10.4f} {'-':>10s} {'-':>8s}")


if __name__ == "__main__":
    main()
