"""Central finite differences used as fallbacks and as independent checks."""

import numpy as np

REL_STEP = 1e-5


def steps(q):
    """Per-coordinate step ``1e-5 * max(1, |q_j|)``."""
    q = np.asarray(q, dtype=float)
    return REL_STEP * np.maximum(1.0, np.abs(q))


def gradient(f, q):
    """Central-difference gradient of a scalar function at a single point."""
    q = np.asarray(q, dtype=float)
    h = steps(q)
    g = np.empty_like(q)
    for j in range(q.size):
        e = np.zeros_like(q)
        e[j] = h[j]
        g[j] = (f(q + e) - f(q - e)) / (2.0 * h[j])
    return g


def jacobian(F, q):
    """Central-difference Jacobian of a vector function at a single point.

    Row ``i`` holds dF_i/dq; for a gradient map this is the Hessian, and it is
    returned symmetrized.
    """
    q = np.asarray(q, dtype=float)
    h = steps(q)
    n = q.size
    J = np.empty((n, n))
    for j in range(n):
        e = np.zeros_like(q)
        e[j] = h[j]
        J[:, j] = (np.asarray(F(q + e)) - np.asarray(F(q - e))) / (2.0 * h[j])
    return 0.5 * (J + J.T)


def hessian(f, q):
    """Second differences of a scalar function (used by test oracles)."""
    q = np.asarray(q, dtype=float)
    h = 1e-4 * np.maximum(1.0, np.abs(q))
    n = q.size
    H = np.empty((n, n))
    f0 = f(q)
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = h[i]
        H[i, i] = (f(q + ei) - 2.0 * f0 + f(q - ei)) / h[i] ** 2
        for j in range(i + 1, n):
            ej = np.zeros(n)
            ej[j] = h[j]
            H[i, j] = H[j, i] = (
                f(q + ei + ej) - f(q + ei - ej) - f(q - ei + ej) + f(q - ei - ej)
            ) / (4.0 * h[i] * h[j])
    return H
