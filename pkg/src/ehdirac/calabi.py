"""Calabi metrics on the canonical bundle of CP^n in symmetric coordinates.

On C^{n+1} with ``s = |z|^2`` and ``F = (1 + kappa/s^{n+1})^{1/(n+1)}``,

    g_{mu nubar} = F delta_{mu nu} + F' zbar_mu z_nu,   F' = (F^{-n} - F)/s,

with ``det g = F^n (sF)' = 1``.  ``n = 1`` is Eguchi-Hanson.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .eh import zdzbar
from .fields import ONE, ZERO, coord, coordbar, power, radius_sq
from .forms import FormField, exterior_derivative, pointwise_norm_sq
from .metric import HermitianMetricField

__all__ = [
    "CalabiParams",
    "MAX_N",
    "general_F_of_s",
    "general_profile",
    "calabi_metric",
    "calabi_inverse",
    "trace_identity_residuals",
    "profile_identity_residuals",
    "beta_mode",
    "beta_norm_sq_closed",
    "l2_form_norm_sq_closed",
    "kahler_form_general",
    "l2_form_general",
    "l2_form_components",
    "radial_l2_component",
    "connection_general",
    "killing_identity",
    "identity_cn_residual",
    "profile_csv_general",
]

MAX_N = 8


@dataclass(frozen=True)
class CalabiParams:
    """Base dimension ``1 <= n <= MAX_N`` and ``kappa >= 0``."""

    n: int
    kappa: float

    def __post_init__(self):
        if int(self.n) != self.n or not (1 <= self.n <= MAX_N):
            raise ValueError(f"n must be an integer in [1, {MAX_N}], got {self.n}")
        if not np.isfinite(self.kappa) or self.kappa < 0:
            raise ValueError(f"kappa must be a finite non-negative real, got {self.kappa}")

    @property
    def dim(self) -> int:
        return self.n + 1


def _params(n, kappa) -> CalabiParams:
    return CalabiParams(int(n), float(kappa))


def general_F_of_s(s, n: int, kappa: float) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0):
        raise ValueError("profiles are defined for s > 0 only")
    return (1.0 + kappa / s ** (n + 1)) ** (1.0 / (n + 1))


def general_profile(n: int, kappa: float):
    """``F`` as a field on C^{n+1}, together with ``F'`` expressed as ``(F^{-n} - F)/s``."""
    p = _params(n, kappa)
    if p.kappa == 0:
        return ONE, ZERO
    s = radius_sq(p.dim)
    F = power(1 + p.kappa * power(s, -(p.n + 1)), 1.0 / (p.n + 1), real_base=True)
    Fp = (power(F, -p.n) - F) * power(s, -1)
    return F, Fp


def calabi_metric(n: int, kappa: float) -> HermitianMetricField:
    p = _params(n, kappa)
    d = p.dim
    F, Fp = general_profile(p.n, p.kappa)
    s = radius_sq(d)
    z = [coord(m) for m in range(d)]
    zb = [coordbar(m) for m in range(d)]
    g = tuple(tuple((F if mu == nu else ZERO) + Fp * zb[mu] * z[nu] for nu in range(d)) for mu in range(d))
    c = p.kappa * power(s, -(p.n + 2)) / F
    ginv = tuple(tuple((1 / F if r == nu else ZERO) + c * zb[r] * z[nu] for nu in range(d)) for r in range(d))
    return HermitianMetricField(d, g, ginv, ONE, name=f"Calabi(n={p.n}, kappa={p.kappa:g})")


def calabi_inverse(n: int, kappa: float):
    """Closed-form inverse ``g_inv[rho][nu] = delta/F + kappa zbar_rho z_nu / (s^{n+2} F)``."""
    return calabi_metric(n, kappa).g_inv


def trace_identity_residuals(n: int, kappa: float, z) -> dict:
    """Residuals of ``Tr g^{-1} = n/F + F^n`` and ``zbar_mu z_nu g^{nu mu} = s F^n``."""
    p = _params(n, kappa)
    z = np.asarray(z, dtype=complex)
    Gi = calabi_metric(p.n, p.kappa).inverse_matrix(z)
    s = np.sum(np.abs(z) ** 2, axis=-1)
    F = general_F_of_s(s, p.n, p.kappa)
    tr = np.trace(Gi, axis1=-2, axis2=-1)
    quad = np.einsum("...m,...n,...nm->...", np.conj(z), z, Gi)
    return {
        "trace": np.abs(tr - (p.n / F + F**p.n)),
        "radial": np.abs(quad - s * F**p.n) / (s * F**p.n),
    }


def profile_identity_residuals(n: int, kappa: float, s) -> dict:
    """Residuals of ``F^n (sF)' = 1`` and ``F - kappa/(F^n s^{n+1}) = F^{-n}``."""
    s = np.asarray(s, dtype=float)
    F = general_F_of_s(s, n, kappa)
    Fp = (F ** (-n) - F) / s
    return {
        "det": np.abs(F**n * (F + s * Fp) - 1),
        "killing": np.abs(F - kappa / (F**n * s ** (n + 1)) - F ** (-n)),
    }


def beta_mode(n: int, kappa: float) -> FormField:
    """Untwisted zero mode ``z.dzbar / (s^{n+1} F^n)``."""
    p = _params(n, kappa)
    F, _ = general_profile(p.n, p.kappa)
    s = radius_sq(p.dim)
    return zdzbar(p.dim).scale(power(s, -(p.n + 1)) * power(F, -p.n))


def beta_norm_sq_closed(s, n: int, kappa: float) -> np.ndarray:
    """``|beta|^2 = 1 / (s^{2n+1} F^n)``."""
    s = np.asarray(s, dtype=float)
    return 1.0 / (s ** (2 * n + 1) * general_F_of_s(s, n, kappa) ** n)


def l2_form_norm_sq_closed(s, n: int, kappa: float) -> np.ndarray:
    """``|omega~|^2 = n(n+1) / (2 (s^{n+1} + kappa)^2)``.

    On the axis the coefficient matrix is ``2i diag(-n chi/F^{n+1}, chi, ...)``
    and the inverse metric is ``diag(F^n, 1/F, ...)``.  Written this way the
    norm avoids the cancellation in ``chi + chi' s`` that the symbolic form
    suffers at small ``s``.
    """
    s = np.asarray(s, dtype=float)
    return n * (n + 1) / (2 * (s ** (n + 1) + kappa) ** 2)


def kahler_form_general(n: int, kappa: float) -> FormField:
    """``omega = 2i d(F z.dzbar)``; its coefficients are ``2i g_{mu nubar}``."""
    p = _params(n, kappa)
    F, _ = general_profile(p.n, p.kappa)
    return exterior_derivative(zdzbar(p.dim).scale(2j * F)).part(1, 1)


def l2_form_general(n: int, kappa: float) -> FormField:
    """``omega~ = 2i d beta`` (the (1,1) part; ``dbar beta = 0``)."""
    return exterior_derivative(beta_mode(n, kappa).scale(2j)).part(1, 1)


def l2_form_components(n: int, kappa: float, z) -> np.ndarray:
    """Closed-form coefficient matrix of ``omega~`` on ``dz_mu ^ dzbar_nu``.

    With ``chi = 1/(s^{n+1} F^n)`` and ``chi' = -(1 + n/F^{n+1}) chi / s``
    the matrix is ``2i (chi delta_{mu nu} + chi' zbar_mu z_nu)``.  On the
    axis ``z = (sqrt(s), 0, ...)`` the first diagonal entry reduces to
    ``-2i n / (s^{n+1} F^{2n+1})``.

    Returns
    -------
    ndarray of shape (..., n+1, n+1)
    """
    p = _params(n, kappa)
    z = np.asarray(z, dtype=complex)
    s = np.sum(np.abs(z) ** 2, axis=-1)[..., None, None]
    F = general_F_of_s(s, p.n, p.kappa)
    chi = 1.0 / (s ** (p.n + 1) * F**p.n)
    chi_prime = -(1 + p.n / F ** (p.n + 1)) * chi / s
    rank_one = np.conj(z)[..., :, None] * z[..., None, :]
    return 2j * (chi * np.eye(p.dim) + chi_prime * rank_one)


def radial_l2_component(s, n: int, kappa: float) -> np.ndarray:
    """``-2i n / (s^{n+1} F^{2n+1})``: the radial diagonal entry of ``omega~``."""
    s = np.asarray(s, dtype=float)
    return -2j * n / (s ** (n + 1) * general_F_of_s(s, n, kappa) ** (2 * n + 1))


def connection_general(n: int, ell: int, kappa: float) -> FormField:
    """``ell (A - conj A)`` with ``A = kappa^{n/(n+1)} z.dzbar / (2 s^{n+1} F^n)``."""
    if int(ell) != ell:
        raise ValueError("ell must be an integer")
    p = _params(n, kappa)
    c = p.kappa ** (p.n / (p.n + 1)) / 2
    A = beta_mode(p.n, p.kappa).scale(c)
    return (A - A.conj()).scale(float(ell))


def killing_identity(n: int, kappa: float, z) -> dict:
    """Check ``omega - kappa omega~ = 2i d(z.dzbar / F^n)`` at the points ``z``.

    Returns
    -------
    dict
        ``max_residual`` and the pointwise ``residual`` array.
    """
    p = _params(n, kappa)
    F, _ = general_profile(p.n, p.kappa)
    lhs = kahler_form_general(p.n, p.kappa) - l2_form_general(p.n, p.kappa).scale(p.kappa)
    rhs = exterior_derivative(zdzbar(p.dim).scale(2j * power(F, -p.n))).part(1, 1)
    res = (lhs - rhs).max_abs(z)
    return {"n": p.n, "kappa": p.kappa, "max_residual": float(np.max(res)), "residual": res}


def identity_cn_residual(z, v) -> np.ndarray:
    """``s|v|^2 - |zbar.v|^2 - sum_{i<j} |z_i v_j - z_j v_i|^2`` for tangent vectors ``v``."""
    z = np.asarray(z, dtype=complex)
    v = np.asarray(v, dtype=complex)
    s = np.sum(np.abs(z) ** 2, axis=-1)
    lhs = s * np.sum(np.abs(v) ** 2, axis=-1)
    rhs = np.abs(np.sum(np.conj(z) * v, axis=-1)) ** 2
    d = z.shape[-1]
    for i in range(d):
        for j in range(i + 1, d):
            rhs = rhs + np.abs(z[..., i] * v[..., j] - z[..., j] * v[..., i]) ** 2
    return (lhs - rhs) / np.maximum(lhs, 1e-300)


def profile_csv_general(n: int, kappa: float, s_values) -> str:
    """CSV with columns ``s, F, omega_tilde_norm_sq, beta_norm_sq`` along ``z = (sqrt(s), 0, ...)``."""
    p = _params(n, kappa)
    s_values = np.asarray(s_values, dtype=float)
    z = np.zeros(s_values.shape + (p.dim,), dtype=complex)
    z[..., 0] = np.sqrt(s_values)
    g = calabi_metric(p.n, p.kappa)
    om = pointwise_norm_sq(l2_form_general(p.n, p.kappa), g).evaluate(z).real
    be = pointwise_norm_sq(beta_mode(p.n, p.kappa), g).evaluate(z).real
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["s", "F", "omega_tilde_norm_sq", "beta_norm_sq"])
    for row in zip(s_values, general_F_of_s(s_values, p.n, p.kappa), om, be):
        w.writerow([repr(float(x)) for x in row])
    return buf.getvalue()
