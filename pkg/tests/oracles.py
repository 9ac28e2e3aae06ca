"""Independent reference implementations used to check the package.

Everything here is deliberately written by a different route than the
library code: numerical integration instead of the closed form, two-pass
summation instead of vectorized covariance, double loops instead of
matrix algebra.  Slow and simple on purpose.
"""
from __future__ import annotations

import numpy as np


def rk4_logistic(r: float, k: float, n0: float, t: float, steps: int = 4000) -> float:
    """Integrate dN/dt = r N (1 - N/K) with classic fourth-order Runge-Kutta."""
    if t == 0:
        return float(n0)
    h = t / steps
    n = float(n0)

    def f(x: float) -> float:
        return r * x * (1.0 - x / k)

    for _ in range(steps):
        k1 = f(n)
        k2 = f(n + 0.5 * h * k1)
        k3 = f(n + 0.5 * h * k2)
        k4 = f(n + h * k3)
        n += (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return n


def rk4_logistic_batch(
    r: np.ndarray, k: np.ndarray, n0: np.ndarray, t: np.ndarray, steps: int = 4000
) -> np.ndarray:
    """Vectorized RK4: integrates each point's ODE with its own step size."""
    h = t / steps
    n = n0.astype(float).copy()

    def f(x):
        return r * x * (1.0 - x / k)

    for _ in range(steps):
        k1 = f(n)
        k2 = f(n + 0.5 * h * k1)
        k3 = f(n + 0.5 * h * k2)
        k4 = f(n + h * k3)
        n += (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return np.where(t == 0, n0, n)


def two_pass_cov(draws: np.ndarray) -> np.ndarray:
    """Sample covariance (n-1 divisor) computed the long way."""
    n = draws.shape[0]
    means = [sum(draws[:, j]) / n for j in range(draws.shape[1])]
    out = np.zeros((draws.shape[1], draws.shape[1]))
    for a in range(draws.shape[1]):
        for b in range(draws.shape[1]):
            acc = 0.0
            for i in range(n):
                acc += (draws[i, a] - means[a]) * (draws[i, b] - means[b])
            out[a, b] = acc / (n - 1)
    return out


def brute_force_prediction_variance(curves: np.ndarray) -> float:
    """Mean over days of the across-draw sample variance, via double loop."""
    n, d = curves.shape
    total = 0.0
    for j in range(d):
        mean = sum(curves[i, j] for i in range(n)) / n
        acc = 0.0
        for i in range(n):
            acc += (curves[i, j] - mean) ** 2
        total += acc / (n - 1)
    return total / d
