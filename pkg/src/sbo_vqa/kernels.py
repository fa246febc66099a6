"""Hot numeric kernels, each with a numba and a pure-numpy implementation.

The public names (``qaoa_evolve``, ``surrogate_value_grad``,
``projected_descent``) are bound to one of the two variants at import time,
see :mod:`sbo_vqa._accel`. Both variants stay importable under ``*_numba`` /
``*_numpy`` so the test suite and the benchmark can compare them.
"""

import math

import numpy as np

from ._accel import USE_NUMBA, njit

# -- statevector -----------------------------------------------------------


def qaoa_evolve_numpy(psi, diag, gammas, betas, n):
    """Apply ``p`` alternating phase/mixer layers to ``psi`` in place."""
    for gamma, beta in zip(gammas, betas):
        psi *= np.exp(-1j * gamma * diag)
        c, s = math.cos(beta), math.sin(beta)
        for q in range(n):
            view = psi.reshape(1 << (n - 1 - q), 2, 1 << q)
            a = view[:, 0, :].copy()
            b = view[:, 1, :]
            view[:, 0, :] = c * a - 1j * s * b
            view[:, 1, :] = c * b - 1j * s * a
    return psi


@njit
def qaoa_evolve_numba(psi, diag, gammas, betas, n):
    dim = psi.shape[0]
    for layer in range(gammas.shape[0]):
        gamma = gammas[layer]
        for k in range(dim):
            ph = -gamma * diag[k]
            psi[k] *= complex(math.cos(ph), math.sin(ph))
        c = math.cos(betas[layer])
        ms = -1j * math.sin(betas[layer])
        for q in range(n):
            stride = 1 << q
            for k in range(dim):
                if k & stride:
                    continue
                a = psi[k]
                b = psi[k | stride]
                psi[k] = c * a + ms * b
                psi[k | stride] = ms * a + c * b
    return psi


# -- surrogate -------------------------------------------------------------


def surrogate_value_grad_numpy(points, values, sigma, theta, normalized=False):
    """Value and gradient of the kernel surrogate at ``theta``.

    Plain: ``sum_j v_j k_j``. Normalized: ``sum_j v_j k_j / sum_j k_j``.
    Here ``k_j = exp(-|theta - x_j|^2 / (2 sigma))``.
    """
    diff = points - theta
    d2 = np.einsum("ij,ij->i", diff, diff)
    if not normalized:
        weights = values * np.exp(-d2 / (2.0 * sigma))
        return float(weights.sum()), weights @ diff / sigma
    # Shift by the nearest distance; the ratio is invariant and cannot underflow.
    k = np.exp(-(d2 - d2.min()) / (2.0 * sigma))
    norm = k.sum()
    value = float(k @ values / norm)
    return value, ((values - value) * k) @ diff / (sigma * norm)


@njit
def surrogate_value_grad_numba(points, values, sigma, theta, normalized=False):
    tau, dim = points.shape
    d2 = np.empty(tau)
    for j in range(tau):
        acc = 0.0
        for m in range(dim):
            dm = points[j, m] - theta[m]
            acc += dm * dm
        d2[j] = acc
    shift = d2.min() if normalized else 0.0
    k = np.empty(tau)
    total = 0.0
    norm = 0.0
    for j in range(tau):
        k[j] = math.exp(-(d2[j] - shift) / (2.0 * sigma))
        total += values[j] * k[j]
        norm += k[j]
    if normalized:
        total /= norm
    grad = np.zeros(dim)
    for j in range(tau):
        w = (values[j] - total) * k[j] if normalized else values[j] * k[j]
        for m in range(dim):
            grad[m] += w * (points[j, m] - theta[m])
    scale = sigma * norm if normalized else sigma
    for m in range(dim):
        grad[m] /= scale
    return total, grad


def _make_projected_descent(value_grad, jit):
    # Same algorithm for both paths; only the value/gradient kernel differs.
    def projected_descent(points, values, sigma, normalized, x0, lo, hi, max_iter, gtol, xtol):
        x = np.minimum(np.maximum(x0, lo), hi)
        f, g = value_grad(points, values, sigma, x, normalized)
        t = 1.0
        converged = False
        it = 0
        while it < max_iter:
            it += 1
            pg = x - np.minimum(np.maximum(x - g, lo), hi)
            if np.sqrt(np.sum(pg * pg)) < gtol:
                converged = True
                break
            while True:
                xn = np.minimum(np.maximum(x - t * g, lo), hi)
                d = xn - x
                fn, gn = value_grad(points, values, sigma, xn, normalized)
                if fn <= f + np.sum(g * d) + np.sum(d * d) / (2.0 * t):
                    break
                t *= 0.5
                if t < 1e-30:
                    break
            step = np.sqrt(np.sum(d * d))
            x = xn
            f = fn
            g = gn
            if step < xtol:
                converged = True
                break
            t *= 2.0
        return x, f, converged, it

    return njit(projected_descent) if jit else projected_descent


projected_descent_numpy = _make_projected_descent(surrogate_value_grad_numpy, jit=False)
projected_descent_numba = _make_projected_descent(surrogate_value_grad_numba, jit=True)

if USE_NUMBA:
    qaoa_evolve = qaoa_evolve_numba
    surrogate_value_grad = surrogate_value_grad_numba
    projected_descent = projected_descent_numba
else:
    qaoa_evolve = qaoa_evolve_numpy
    surrogate_value_grad = surrogate_value_grad_numpy
    projected_descent = projected_descent_numpy
