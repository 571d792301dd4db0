"""Hand-written reference formulas, kept independent of the form engine.

Derivatives come either from finite differences or from the scalar-field
tree (which is itself checked against finite differences), and metric
entries are read straight off the metric matrix.
"""

import numpy as np

FD_REL_STEP = 1e-5


def fd_wirtinger(func, z, mu):
    """Central-difference ``(d/dz_mu, d/dzbar_mu)`` of ``func`` at points ``z``.

    The step is ``1e-5 * max(1, |x|)`` in each real direction.
    """
    z = np.asarray(z, dtype=complex)
    h = FD_REL_STEP * np.maximum(1.0, np.abs(z[..., mu]))
    e = np.zeros(z.shape, dtype=complex)
    e[..., mu] = h
    dx = (func(z + e) - func(z - e)) / (2 * h)
    dy = (func(z + 1j * e) - func(z - 1j * e)) / (2 * h)
    return 0.5 * (dx - 1j * dy), 0.5 * (dx + 1j * dy)


def _d(f, z):
    """Field-tree Wirtinger derivatives ``(d_1 f, d_2 f, dbar_1 f, dbar_2 f)`` at ``z``."""
    return [f.dz(0).evaluate(z), f.dz(1).evaluate(z), f.dzbar(0).evaluate(z), f.dzbar(1).evaluate(z)]


def d_plus(alpha, delta, g, z):
    """``D(alpha + delta dzbar_1 ^ dzbar_2)`` as the pair of ``dzbar_1, dzbar_2`` coefficients.

    ``(dbar_1 alpha - g11 d_2 delta + g21 d_1 delta) / v`` and
    ``(dbar_2 alpha - g12 d_2 delta + g22 d_1 delta) / v`` with ``gab = g_{z_a zbar_b}``.
    """
    G = g.matrix(z)
    v = g.determinant(z)
    _a1, _a2, ab1, ab2 = _d(alpha, z)
    d1, d2, _b1, _b2 = _d(delta, z)
    c1 = ab1 + (-G[..., 0, 0] * d2 + G[..., 1, 0] * d1) / v
    c2 = ab2 + (-G[..., 0, 1] * d2 + G[..., 1, 1] * d1) / v
    return c1, c2


def d_minus_star(beta, gamma, g, z):
    """Kähler form of ``D(beta dzbar_1 + gamma dzbar_2)``: ``(scalar, dzbar_1 ^ dzbar_2 coefficient)``."""
    G = g.matrix(z)
    v = g.determinant(z)
    b1, b2, bb1, bb2 = _d(beta, z)
    c1, c2, cb1, cb2 = _d(gamma, z)
    scalar = (G[..., 1, 1] * b1 - G[..., 1, 0] * c1 - G[..., 0, 1] * b2 + G[..., 0, 0] * c2) / v
    return scalar, cb1 - bb2


def d_minus_hermitian(beta, gamma, g, z):
    """Hermitian form of the same operator, with the metric inside the derivatives."""
    v = g.determinant(z)
    g11, g12, g21, g22 = g.g[0][0], g.g[0][1], g.g[1][0], g.g[1][1]
    terms = (g22 * beta).dz(0) - (g21 * gamma).dz(0) - (g12 * beta).dz(1) + (g11 * gamma).dz(1)
    _b1, _b2, bb1, bb2 = _d(beta, z)
    _c1, _c2, cb1, cb2 = _d(gamma, z)
    return terms.evaluate(z) / v, cb1 - bb2


def kahler_cancellation(g, z):
    """``(d_1 g_{21} - d_2 g_{11}, d_1 g_{22} - d_2 g_{12})`` at ``z``."""
    G = g.g
    return (
        G[1][0].dz(0).evaluate(z) - G[0][0].dz(1).evaluate(z),
        G[1][1].dz(0).evaluate(z) - G[0][1].dz(1).evaluate(z),
    )


def eh_metric_matrix(z, kappa):
    """Eguchi-Hanson metric straight from ``F|z1 dz2 - z2 dz1|^2/s + |zbar.dz|^2/(F s)``."""
    z = np.asarray(z, dtype=complex)
    s = np.sum(np.abs(z) ** 2, axis=-1)
    F = np.sqrt(1 + kappa / s**2)
    a = np.stack([-z[..., 1], z[..., 0]], axis=-1)  # coefficients of z1 dz2 - z2 dz1
    b = np.conj(z)  # coefficients of zbar.dz
    return (F / s)[..., None, None] * a[..., :, None] * np.conj(a)[..., None, :] + (1 / (F * s))[..., None, None] * (
        b[..., :, None] * np.conj(b)[..., None, :]
    )
