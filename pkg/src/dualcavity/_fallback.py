"""Pure numpy implementations of the compiled kernels."""

import numpy as np


def rk4_evolve(generator, v0, dt, nsteps, dim, trace_tol):
    """Fixed-step RK4 for dv/dt = generator @ v; same contract as the compiled kernel."""
    generator = np.ascontiguousarray(generator, dtype=complex)
    v = np.array(v0, dtype=complex)
    n = generator.shape[0]
    if n != v.shape[0] or n != generator.shape[1] or dim * dim != n:
        raise ValueError("generator, state and dim are inconsistent")
    diag = np.arange(dim) * (dim + 1)
    tr0 = v[diag].sum()
    max_dev = 0.0
    half, sixth = 0.5 * dt, dt / 6.0
    for step in range(nsteps):
        k1 = generator @ v
        k2 = generator @ (v + half * k1)
        k3 = generator @ (v + half * k2)
        k4 = generator @ (v + dt * k3)
        v = v + sixth * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        dev = abs(v[diag].sum() - tr0)
        if not np.isfinite(dev):
            return v, step + 1, float("inf")
        max_dev = max(max_dev, dev)
        if max_dev > trace_tol:
            return v, step + 1, max_dev
    return v, nsteps, max_dev
