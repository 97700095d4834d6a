"""Time the numba and numpy kernels on the same inputs.

    python3 benchmarks/bench_kernels.py [--designs 500] [--steps 100000] [--repeat 3]
"""

import argparse
import time

import numpy as np

from jrcc import _kernels


def inputs(n, seed=0):
    rng = np.random.default_rng(seed)
    return dict(
        voltage=rng.uniform(0, 1000, n),
        gap=rng.uniform(0.5e-6, 20e-6, n),
        d=55e-6,
        eps_d=3.9,
        eps_g=1.0,
        mu=rng.uniform(0.05, 0.6, n),
        theta=rng.uniform(1e-3, 8 * np.pi, n),
        width=10e-3,
        radius=12.7e-3,
        t_hold=rng.uniform(0, 2, n),
    )


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - start)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--designs", type=int, default=500)
    ap.add_argument("--steps", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    x = inputs(args.designs)
    # adhesive force per radian, alpha = beta * l * r
    alpha = (0.5 * _kernels.EPS0 * x["voltage"] ** 2
             * ((x["eps_g"] * x["eps_d"] / (x["d"] * x["eps_g"] + x["gap"] * x["eps_d"])) ** 2
                + (x["eps_g"] / x["gap"]) ** 2) * x["width"] * x["radius"])

    backends = ["numpy"] + (["numba"] if _kernels.HAVE_NUMBA else [])
    results = {}
    for b in backends:
        # first call compiles the numba kernels
        _kernels.rk4_tension(x["t_hold"], x["mu"], x["theta"], alpha, 1000, backend=b)
        _kernels.governing_tension_batch(**x, backend=b)
        t_rk4, rk4 = best_of(lambda: _kernels.rk4_tension(x["t_hold"], x["mu"], x["theta"], alpha,
                                                          args.steps, backend=b), args.repeat)
        t_gov, gov = best_of(lambda: _kernels.governing_tension_batch(**x, backend=b), max(args.repeat, 100))
        results[b] = (rk4, gov)
        print(f"{b:>6}: rk4 {args.designs} designs x {args.steps} steps  {t_rk4 * 1e3:9.2f} ms   "
              f"closed form {t_gov * 1e6:9.2f} us")

    if len(results) == 2:
        (r_np, g_np), (r_nb, g_nb) = results["numpy"], results["numba"]
        print(f"max |numba - numpy| / |numpy|: rk4 {np.max(np.abs(r_nb - r_np) / np.abs(r_np)):.2e}, "
              f"closed form {np.max(np.abs(g_nb - g_np) / np.abs(g_np)):.2e}")
    else:
        print("numba unavailable; only the numpy path was timed")


if __name__ == "__main__":
    main()
