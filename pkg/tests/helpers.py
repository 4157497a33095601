"""Shared oracles for the test suite.

Everything here is deliberately independent of the package internals: the
finite-difference Jacobian and the generic RK4 integrator are the reference
implementations that closed-form results are checked against.
"""

import numpy as np

from armlift.arm import ArmSpec, Configuration, eval_arm, gram, nearest_critical_distance


def fd_jacobian(func, x, h=1e-6):
    """Central-difference Jacobian of func at x (both 1-d arrays)."""
    x = np.asarray(x, dtype=float)
    f0 = np.asarray(func(x))
    jac = np.zeros((f0.size, x.size))
    for j in range(x.size):
        step = np.zeros_like(x)
        step[j] = h
        jac[:, j] = (np.asarray(func(x + step)) - np.asarray(func(x - step))) / (2 * h)
    return jac


def rk4_integrate(rhs, y0, t0, t1, n):
    """Plain fixed-step RK4 from t0 to t1 in n steps; rhs(t, y) -> dy/dt."""
    y = np.array(y0, dtype=float)
    h = (t1 - t0) / n
    t = t0
    for _ in range(n):
        k1 = rhs(t, y)
        k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
    return y


def planar_jacobian(spec, angles):
    """Analytic Jacobian of the planar arm map in angle coordinates."""
    a = spec.lengths_array
    return np.stack([-a * np.sin(angles), a * np.cos(angles)])


def random_planar_arm(rng, m=None):
    m = int(rng.integers(3, 6)) if m is None else m
    lengths = rng.uniform(0.5, 1.5, size=m)
    return ArmSpec(tuple(float(a) for a in lengths), 2)


def random_regular_config(rng, spec, det_floor=0.05, radial_margin=0.1):
    """Random planar configuration with healthy Gram determinant, away from
    critical radii by radial_margin (absolute)."""
    for _ in range(500):
        angles = rng.uniform(-np.pi, np.pi, size=spec.m)
        q = Configuration.from_angles(angles)
        if gram(spec, q).det < det_floor * spec.scale**2:
            continue
        b = eval_arm(spec, q)
        if nearest_critical_distance(spec, float(np.hypot(b[0], b[1]))) < radial_margin:
            continue
        return q
    raise RuntimeError("could not sample a comfortably regular configuration")


def random_sphere_point(rng, d):
    v = rng.normal(size=d)
    return v / np.linalg.norm(v)
