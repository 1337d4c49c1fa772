"""Compare the pure-Python and compiled update kernels.

Times ``update_point`` on a fixed batch of elastic and plastic increments
taken from a uniaxial tension path, then a whole mixed-control path run
through each kernel.

    python3 benchmarks/bench_kernel.py [--repeat N]
"""

import argparse
import time

import numpy as np

from triaxdamage import _backend
from triaxdamage import drivers as dv
from triaxdamage import integrator as I
from triaxdamage import material_model as mm


def sample_calls(params, n=200):
    """(eps_e, ebar_p, D, deps) argument tuples along a tension path."""
    recs = dv.run_path(params, dv.PathSpec.uniaxial_tension(strain=0.6, steps=n))
    calls = []
    prev_eps = np.zeros(6)
    state = I.MaterialState.virgin(params)
    for r in recs:
        deps = r.eps - prev_eps
        calls.append((state.eps_e.copy(), state.ebar_p, state.D, deps))
        state = I.return_map(state, deps, params, tangent=False).state
        prev_eps = r.eps
    return calls


def time_kernel(kernel, props, calls, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for eps_e, ebar, D, deps in calls:
            kernel.update_point(props, eps_e, ebar, D, deps)
        best = min(best, time.perf_counter() - t0)
    return best / len(calls)


def time_path(name, params, repeat):
    prev = _backend.use(name)
    try:
        best = float("inf")
        for _ in range(repeat):
            t0 = time.perf_counter()
            dv.run_path(params, dv.PathSpec.uniaxial_tension(strain=0.7, steps=2000))
            best = min(best, time.perf_counter() - t0)
        return best
    finally:
        _backend.use(prev)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    params = mm.REFERENCE
    props = params.to_array()
    calls = sample_calls(params)
    names = sorted(_backend.KERNELS)
    if "cython" not in names:
        print("compiled kernel not built; timing the Python kernel only")
    point = {n: time_kernel(_backend.KERNELS[n], props, calls, args.repeat) for n in names}
    path = {n: time_path(n, params, args.repeat) for n in names}
    print(f"{'kernel':8s} {'update_point (us)':>18s} {'tension path, 2000 steps (s)':>30s}")
    for n in names:
        print(f"{n:8s} {point[n] * 1e6:18.1f} {path[n]:30.3f}")
    if len(names) == 2:
        print(f"speedup  {point['python'] / point['cython']:17.1f}x "
              f"{path['python'] / path['cython']:29.2f}x")


if __name__ == "__main__":
    main()
