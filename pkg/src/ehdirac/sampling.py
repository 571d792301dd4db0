"""Reproducible random sampling of chart points, tangent vectors and unitaries."""

from __future__ import annotations

import numpy as np
from scipy.stats import unitary_group

__all__ = ["random_points", "random_tangents", "random_unitary", "random_special_unitary", "default_rng"]

S_RANGE = (0.2, 20.0)
MIN_ABS = 1e-3


def default_rng(seed=None) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_points(rng: np.random.Generator, count: int, dim: int, s_range=S_RANGE, min_abs: float = MIN_ABS) -> np.ndarray:
    """Points of C^dim with ``s`` log-uniform in ``s_range`` and uniform direction.

    Points with any ``|z_mu| < min_abs`` are redrawn.

    Returns
    -------
    ndarray of shape (count, dim), complex
    """
    out = np.empty((0, dim), dtype=complex)
    lo, hi = np.log(s_range[0]), np.log(s_range[1])
    while len(out) < count:
        m = 2 * (count - len(out)) + 4
        v = rng.normal(size=(m, dim)) + 1j * rng.normal(size=(m, dim))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        s = np.exp(rng.uniform(lo, hi, size=m))
        z = v * np.sqrt(s)[:, None]
        z = z[np.all(np.abs(z) >= min_abs, axis=1)]
        out = np.concatenate([out, z])
    return out[:count]


def random_tangents(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    """Complex tangent vectors (``dz`` components) with standard normal entries."""
    return rng.normal(size=(count, dim)) + 1j * rng.normal(size=(count, dim))


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    return unitary_group.rvs(dim, random_state=rng)


def random_special_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    u = random_unitary(rng, dim)
    return u / np.linalg.det(u) ** (1.0 / dim)
