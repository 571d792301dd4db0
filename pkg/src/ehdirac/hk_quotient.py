"""Eguchi-Hanson as a hyperkähler quotient of flat C^4 by U(1).

The level set ``|Z|^2 - |W|^2 = 2 sqrt(kappa)``, ``Z.W = 0`` is parametrised by
``(z_1, z_2, psi)`` through

    Z = z e^{i psi} f^{1/2},   W = (-z_2, z_1) e^{-i psi} f^{-1/2},

and half the flat metric pulls back to ``g_EH + sF (dpsi + i(A - conj A))^2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import eh

__all__ = [
    "AmbientPoint",
    "LevelSetCoords",
    "moment_maps",
    "quaternion_moment_map",
    "moment_maps_from_quaternion",
    "embed",
    "embed_jacobian",
    "pullback_form",
    "pullback_check",
    "extract_connection",
    "u2_equivariance",
]

FD_STEP = 1e-6


@dataclass(frozen=True)
class AmbientPoint:
    """A point ``(Z, W)`` of C^2 x C^2 = H^2."""

    Z: tuple
    W: tuple

    def __post_init__(self):
        Z = tuple(complex(x) for x in self.Z)
        W = tuple(complex(x) for x in self.W)
        if len(Z) != 2 or len(W) != 2 or not np.all(np.isfinite(Z + W)):
            raise ValueError("AmbientPoint needs two finite complex pairs")
        object.__setattr__(self, "Z", Z)
        object.__setattr__(self, "W", W)

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.Z + self.W, dtype=complex)


@dataclass(frozen=True)
class LevelSetCoords:
    """Coordinates ``(z, psi)`` on the level set, for a given ``kappa``."""

    z: tuple
    psi: float
    kappa: float

    def __post_init__(self):
        z = tuple(complex(x) for x in self.z)
        object.__setattr__(self, "z", z)
        if len(z) != 2:
            raise ValueError("LevelSetCoords needs (z_1, z_2)")
        if abs(z[0]) ** 2 + abs(z[1]) ** 2 <= 0:
            raise ValueError("s = 0 is excluded")
        eh.EHParams(self.kappa)

    @property
    def s(self) -> float:
        return abs(self.z[0]) ** 2 + abs(self.z[1]) ** 2


def moment_maps(p: AmbientPoint, kappa: float):
    """``(mu_R, mu_C) = (|Z|^2 - |W|^2 - 2 sqrt(kappa), Z_1 W_1 + Z_2 W_2)``."""
    Z, W = np.array(p.Z), np.array(p.W)
    mu_r = float(np.sum(np.abs(Z) ** 2) - np.sum(np.abs(W) ** 2) - 2 * np.sqrt(kappa))
    mu_c = complex(Z @ W)
    return mu_r, mu_c


def _qmul(p, q):
    # quaternions as (a, b) meaning a + b j, with j c = conj(c) j
    a, b = p
    c, d = q
    return (a * c - b * np.conj(d), a * d + b * np.conj(c))


def quaternion_moment_map(p: AmbientPoint, kappa: float):
    """``mu(q) = (1/2) sum_a q_a i conj(q_a) - sqrt(kappa) i`` with ``q_a = Z_a + W_a j``.

    Returns
    -------
    tuple of complex
        ``(x, y)`` with ``mu = x + y j``.
    """
    x, y = -1j * np.sqrt(kappa), 0j
    for Za, Wa in zip(p.Z, p.W):
        r = _qmul(_qmul((Za, Wa), (1j, 0)), (np.conj(Za), -Wa))
        x += r[0] / 2
        y += r[1] / 2
    return complex(x), complex(y)


def moment_maps_from_quaternion(p: AmbientPoint, kappa: float):
    """Repackage ``mu = (i/2) mu_R + (-i mu_C) j`` as ``(mu_R, mu_C)``."""
    x, y = quaternion_moment_map(p, kappa)
    return float((-2j * x).real), complex(1j * y)


def embed(c: LevelSetCoords) -> AmbientPoint:
    s = c.s
    f = float(eh.f_of_s(s, c.kappa))
    z1, z2 = c.z
    ph = np.exp(1j * c.psi)
    return AmbientPoint((z1 * ph * f**0.5, z2 * ph * f**0.5), (-z2 / ph / f**0.5, z1 / ph / f**0.5))


def _real_coords(c: LevelSetCoords) -> np.ndarray:
    z1, z2 = c.z
    return np.array([z1.real, z1.imag, z2.real, z2.imag, c.psi])


def _from_real(x, kappa) -> LevelSetCoords:
    return LevelSetCoords((x[0] + 1j * x[1], x[2] + 1j * x[3]), x[4], kappa)


def embed_jacobian(c: LevelSetCoords, method: str = "fd", step: float = FD_STEP) -> np.ndarray:
    """Jacobian of :func:`embed` in real coordinates ``(x_1, y_1, x_2, y_2, psi)``.

    Returns
    -------
    ndarray of shape (4, 5), complex
        Columns are the complex velocities of ``(Z_1, Z_2, W_1, W_2)``.
    """
    if method == "fd":
        x0 = _real_coords(c)
        cols = []
        for k in range(5):
            h = step * max(1.0, abs(x0[k]))
            xp, xm = x0.copy(), x0.copy()
            xp[k] += h
            xm[k] -= h
            cols.append((embed(_from_real(xp, c.kappa)).vector - embed(_from_real(xm, c.kappa)).vector) / (2 * h))
        return np.stack(cols, axis=1)
    if method != "analytic":
        raise ValueError(f"unknown Jacobian method {method!r}")
    s = c.s
    z = np.array(c.z)
    F = float(eh.F_of_s(s, c.kappa))
    f = float(eh.f_of_s(s, c.kappa))
    ph = np.exp(1j * c.psi)
    rate = -np.sqrt(c.kappa) / (2 * s**2 * F)  # d log f^{1/2} / ds
    Zc = z * ph * f**0.5
    Wc = np.array([-z[1], z[0]]) / ph / f**0.5
    cols = []
    for mu in range(2):
        for unit, ds in ((1.0, 2 * z[mu].real), (1j, 2 * z[mu].imag)):
            dz = np.zeros(2, dtype=complex)
            dz[mu] = unit
            dZ = dz * ph * f**0.5 + Zc * rate * ds
            dW = np.array([-dz[1], dz[0]]) / ph / f**0.5 - Wc * rate * ds
            cols.append(np.concatenate([dZ, dW]))
    cols.append(np.concatenate([1j * Zc, -1j * Wc]))
    return np.stack(cols, axis=1)


def pullback_form(c: LevelSetCoords, method: str = "fd") -> np.ndarray:
    """Half the flat metric of C^4 pulled back to real 5x5 form."""
    J = embed_jacobian(c, method)
    return 0.5 * np.real(J.conj().T @ J)


def _tangent_to_real(v) -> np.ndarray:
    a1, a2, t = v
    return np.array([a1.real, a1.imag, a2.real, a2.imag, float(np.real(t))])


def _completed_square(c: LevelSetCoords, v) -> float:
    a = np.array(v[:2], dtype=complex)
    t = float(np.real(v[2]))
    z = np.array(c.z)[None, :]
    g = eh.eh_metric(c.kappa)
    gv = float(g.real_inner(z, a[None, :], a[None, :])[0])
    A = eh.connection_potential(c.kappa)
    Av = sum(A.coefficient((), (m,)).evaluate(z)[0] * np.conj(a[m]) for m in range(2))
    horiz = t - 2 * Av.imag  # dpsi(v) + i(A - conj A)(v)
    return gv + c.s * float(eh.F_of_s(c.s, c.kappa)) * horiz**2


def pullback_check(c: LevelSetCoords, tangents, method: str = "fd") -> dict:
    """Compare the pulled-back metric with ``g_EH + sF (dpsi + i(A - conj A))^2``.

    Parameters
    ----------
    tangents : sequence of ``(a_1, a_2, t)``
        ``dz`` components and ``dpsi`` component of each tangent vector.

    Returns
    -------
    dict
        ``pullback``, ``model`` and ``errors`` lists plus ``max_error``.
    """
    h = pullback_form(c, method)
    pull, model = [], []
    for v in tangents:
        x = _tangent_to_real(v)
        pull.append(float(x @ h @ x))
        model.append(_completed_square(c, v))
    errors = [abs(p - m) / max(1.0, abs(m)) for p, m in zip(pull, model)]
    return {"pullback": pull, "model": model, "errors": errors, "max_error": max(errors) if errors else 0.0}


def extract_connection(c: LevelSetCoords, method: str = "analytic") -> np.ndarray:
    """Read off the (0,1) components ``A_mu`` from the ``psi``-cross terms.

    ``h(d_psi, u) = sF i(A - conj A)(u)`` gives ``Re A_mu = h(psi, y_mu)/(2sF)``
    and ``Im A_mu = -h(psi, x_mu)/(2sF)``.
    """
    h = pullback_form(c, method)
    sF = c.s * float(eh.F_of_s(c.s, c.kappa))
    return np.array([(h[4, 2 * m + 1] - 1j * h[4, 2 * m]) / (2 * sF) for m in range(2)])


def u2_equivariance(h, c: LevelSetCoords) -> dict:
    """Compare ``embed(h z, psi)`` with ``(h Z, conj(h) W)``.

    The two agree exactly for ``h`` in SU(2); for a general unitary the ``W``
    components differ by the phase ``det h``.  Moment maps are invariant in
    both cases.
    """
    h = np.asarray(h, dtype=complex)
    p = embed(c)
    acted = AmbientPoint(tuple(h @ np.array(p.Z)), tuple(np.conj(h) @ np.array(p.W)))
    moved = embed(LevelSetCoords(tuple(h @ np.array(c.z)), c.psi, c.kappa))
    diff = float(np.max(np.abs(acted.vector - moved.vector)))
    det = np.linalg.det(h)
    corrected = AmbientPoint(moved.Z, tuple(np.array(moved.W) / det))
    mu0 = moment_maps(p, c.kappa)
    mu1 = moment_maps(acted, c.kappa)
    return {
        "difference": diff,
        "difference_after_det_phase": float(np.max(np.abs(acted.vector - corrected.vector))),
        "moment_change": max(abs(mu0[0] - mu1[0]), abs(mu0[1] - mu1[1])),
        "moment_residual": max(abs(mu1[0]), abs(mu1[1])),
    }
