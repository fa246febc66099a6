"""Time the numba and numpy variants of each hot kernel, then one SBO run per backend.

    python benchmarks/bench_kernels.py [--repeat 200] [--skip-e2e]

The end-to-end part runs a short SBO optimisation in two subprocesses, one
with SBO_VQA_DISABLE_JIT=1, so import-time backend selection is exercised too.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from sbo_vqa import kernels
from sbo_vqa.circuit_sim import random_connected_graph
from sbo_vqa.circuit_sim.states import maxcut_diagonal


def best_time(fn, repeat):
    fn()  # warm-up, includes JIT compilation
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def row(name, t_nb, t_np):
    print(f"{name:<36} numba {t_nb * 1e6:10.1f} us   numpy {t_np * 1e6:10.1f} us   x{t_np / t_nb:6.1f}")


def bench_qaoa(n, p, repeat):
    rng = np.random.default_rng(0)
    g = random_connected_graph(n, 0.5, rng)
    diag = maxcut_diagonal(g)
    gammas, betas = rng.uniform(0, np.pi, p), rng.uniform(0, np.pi, p)
    psi0 = np.full(1 << n, 2.0 ** (-n / 2), dtype=complex)
    out_nb = kernels.qaoa_evolve_numba(psi0.copy(), diag, gammas, betas, n)
    out_np = kernels.qaoa_evolve_numpy(psi0.copy(), diag, gammas, betas, n)
    assert np.allclose(out_nb, out_np, atol=1e-12)
    t_nb = best_time(lambda: kernels.qaoa_evolve_numba(psi0.copy(), diag, gammas, betas, n), repeat)
    t_np = best_time(lambda: kernels.qaoa_evolve_numpy(psi0.copy(), diag, gammas, betas, n), repeat)
    row(f"qaoa_evolve n={n} p={p}", t_nb, t_np)


def bench_surrogate(tau, dim, repeat, normalized):
    rng = np.random.default_rng(1)
    pts, vals, theta = rng.random((tau, dim)), rng.normal(size=tau), rng.random(dim)
    args = (pts, vals, 0.6, theta, normalized)
    t_nb = best_time(lambda: kernels.surrogate_value_grad_numba(*args), repeat)
    t_np = best_time(lambda: kernels.surrogate_value_grad_numpy(*args), repeat)
    tag = "normalized" if normalized else "plain"
    row(f"surrogate_value_grad D={dim} {tag}", t_nb, t_np)


def bench_descent(tau, dim, repeat):
    rng = np.random.default_rng(2)
    pts, vals = rng.random((tau, dim)) * 0.2, rng.normal(size=tau)
    lo, hi = np.zeros(dim), np.full(dim, 0.2)
    x0 = np.full(dim, 0.1)
    args = (pts, vals, 0.6, True, x0, lo, hi, 500, 1e-8, 1e-10)
    t_nb = best_time(lambda: kernels.projected_descent_numba(*args), max(1, repeat // 10))
    t_np = best_time(lambda: kernels.projected_descent_numpy(*args), max(1, repeat // 10))
    row(f"projected_descent D={dim}", t_nb, t_np)


E2E = """
import time, numpy as np
from sbo_vqa import SboConfig, sbo_run, backend_name
from sbo_vqa.circuit_sim import QaoaObjective, random_connected_graph
obj = QaoaObjective(random_connected_graph(8, 0.5, np.random.default_rng(0)), 3, shots=250)
sbo_run(obj, np.full(obj.dim, 0.5), SboConfig(iterations=2), np.random.default_rng(0))
t0 = time.perf_counter()
sbo_run(obj, np.full(obj.dim, 0.5), SboConfig(iterations=30), np.random.default_rng(0))
print(backend_name(), time.perf_counter() - t0)
"""


def bench_e2e():
    for flag in ("0", "1"):
        env = dict(os.environ, SBO_VQA_DISABLE_JIT=flag)
        out = subprocess.run([sys.executable, "-c", E2E], env=env, capture_output=True, text=True, check=True)
        backend, seconds = out.stdout.split()
        print(f"sbo_run n=8 p=3 M=30 ({backend:<5})         {float(seconds):8.3f} s")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--skip-e2e", action="store_true")
    args = ap.parse_args()
    for n, p in ((6, 2), (10, 3), (14, 3)):
        bench_qaoa(n, p, max(5, args.repeat // (1 << max(0, n - 8))))
    for dim in (2, 4, 14):
        bench_surrogate(20, dim, args.repeat, normalized=False)
        bench_surrogate(20, dim, args.repeat, normalized=True)
    for dim in (4, 14):
        bench_descent(20, dim, args.repeat)
    if not args.skip_e2e:
        bench_e2e()


if __name__ == "__main__":
    main()
