"""Eguchi-Hanson geometry in equal-standing coordinates ``(z_1, z_2)``.

With ``s = |z_1|^2 + |z_2|^2`` and ``F = sqrt(1 + kappa/s^2)`` the metric is

    g = (F |z_1 dz_2 - z_2 dz_1|^2 + F^{-1} |zbar_1 dz_1 + zbar_2 dz_2|^2) / s

and has unit determinant.  ``kappa = 0`` is flat C^2.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .fields import (
    ONE,
    GuardedField,
    coord,
    coordbar,
    power,
    radius_sq,
)
from .forms import FormField, exterior_derivative, pointwise_norm_sq
from .metric import HermitianMetricField

__all__ = [
    "EHParams",
    "BundleChartPoint",
    "BiaxialPoint",
    "BranchCutError",
    "F_of_s",
    "f_of_s",
    "profiles",
    "eh_metric",
    "eh_inverse",
    "zdzbar",
    "kahler_form",
    "l2_form",
    "theta3",
    "theta3_identity_residual",
    "connection_potential",
    "connection",
    "asinh_potential",
    "frame",
    "to_bundle",
    "from_bundle",
    "biaxial_to_z",
    "z_to_biaxial",
    "left_invariant_forms",
    "biaxial_metric",
    "biaxial_jacobian",
    "biaxial_pullback_residual",
    "profile_rows",
    "profile_csv",
]

FRAME_MIN_ABS_Z2 = 1e-6
BRANCH_CUT_TOL = 1e-12


@dataclass(frozen=True)
class EHParams:
    """Eguchi-Hanson parameter ``kappa >= 0`` (zero means flat C^2)."""

    kappa: float

    def __post_init__(self):
        if not np.isfinite(self.kappa) or self.kappa < 0:
            raise ValueError(f"kappa must be a finite non-negative real, got {self.kappa}")


def _kappa(kappa) -> float:
    return EHParams(float(kappa)).kappa


# -- radial profiles -------------------------------------------------------
def F_of_s(s, kappa: float) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0):
        raise ValueError("profiles are defined for s > 0 only")
    return np.sqrt(1.0 + kappa / s**2)


def f_of_s(s, kappa: float) -> np.ndarray:
    """``f = F + sqrt(kappa)/s``, the level-set function of the quotient."""
    return F_of_s(s, kappa) + np.sqrt(kappa) / np.asarray(s, dtype=float)


def profiles(kappa: float, dim: int = 2):
    """Symbolic ``(F, f)`` as fields of ``s`` on C^dim.

    Returns
    -------
    F, f : ScalarField
        ``F = sqrt(1 + kappa/s^2)`` and ``f = F + sqrt(kappa)/s``.
    """
    kappa = _kappa(kappa)
    if kappa == 0:
        return ONE, ONE
    s = radius_sq(dim)
    F = power(1 + kappa * power(s, -2), 0.5, real_base=True)
    f = F + np.sqrt(kappa) * power(s, -1)
    return F, f


# -- metric ------------------------------------------------------------------
def _guard_z2(z):
    if np.any(np.abs(np.asarray(z)[..., 1]) < FRAME_MIN_ABS_Z2):
        raise ValueError("the unitary frame is undefined near z_2 = 0")


def frame(kappa: float):
    """Unitary (1,0) coframe ``(e_1, e_2)`` and its coefficient matrix.

    ``e_1 = sqrt(F/s) (zbar_2/z_2)(z_2 dz_1 - z_1 dz_2)`` and
    ``e_2 = (Fs)^{-1/2} (z_2/zbar_2)(zbar_1 dz_1 + zbar_2 dz_2)``; evaluation
    raises near ``z_2 = 0`` where the phase factors are undefined.

    Returns
    -------
    e1, e2 : FormField
    E : tuple of tuple of ScalarField
        ``E[a][mu]`` with ``e_a = sum_mu E[a][mu] dz_mu``.
    """
    kappa = _kappa(kappa)
    F, _ = profiles(kappa)
    s = radius_sq(2)
    z1, z2, zb1, zb2 = coord(0), coord(1), coordbar(0), coordbar(1)
    a = power(F * power(s, -1), 0.5, real_base=True)
    b = power(F * s, -0.5, real_base=True)
    E = (
        (GuardedField(a * zb2, _guard_z2), GuardedField(-1.0 * a * zb2 * z1 * power(z2, -1), _guard_z2)),
        (GuardedField(b * z2 * zb1 * power(zb2, -1), _guard_z2), GuardedField(b * z2, _guard_z2)),
    )
    e1 = FormField(2, {((0,), ()): E[0][0], ((1,), ()): E[0][1]})
    e2 = FormField(2, {((0,), ()): E[1][0], ((1,), ()): E[1][1]})
    return e1, e2, E


def eh_metric(kappa: float) -> HermitianMetricField:
    """The Eguchi-Hanson metric, its inverse and ``det = 1``, from closed forms."""
    kappa = _kappa(kappa)
    F, _ = profiles(kappa)
    s = radius_sq(2)
    Finv = 1 / F
    sinv = power(s, -1)
    z1, z2, zb1, zb2 = coord(0), coord(1), coordbar(0), coordbar(1)
    a1, a2 = z1 * zb1, z2 * zb2
    g = (
        (sinv * (F * a2 + Finv * a1), sinv * (Finv - F) * z2 * zb1),
        (sinv * (Finv - F) * z1 * zb2, sinv * (F * a1 + Finv * a2)),
    )
    g_inv = (
        (sinv * (F * a1 + Finv * a2), sinv * (F - Finv) * zb1 * z2),
        (sinv * (F - Finv) * z1 * zb2, sinv * (F * a2 + Finv * a1)),
    )
    _, _, E = frame(kappa)
    return HermitianMetricField(2, g, g_inv, ONE, frame=E, name=f"EH(kappa={kappa:g})")


def eh_inverse(kappa: float):
    """Closed-form inverse ``g_inv[mu][nu]`` (pairing of ``dzbar_mu`` with ``dzbar_nu``)."""
    return eh_metric(kappa).g_inv


# -- distinguished forms ---------------------------------------------------
def zdzbar(dim: int) -> FormField:
    """The (0,1)-form ``z . dzbar = sum_mu z_mu dzbar_mu``."""
    return FormField(dim, {((), (m,)): coord(m) for m in range(dim)})


def zbardz(dim: int) -> FormField:
    """The (1,0)-form ``zbar . dz``."""
    return FormField(dim, {((m,), ()): coordbar(m) for m in range(dim)})


def kahler_form(kappa: float) -> FormField:
    """``omega = 2i d(F z.dzbar)``, the (1,1) part (the (0,2) part vanishes)."""
    F, _ = profiles(kappa)
    return exterior_derivative(zdzbar(2).scale(2j * F)).part(1, 1)


def l2_form(kappa: float) -> FormField:
    """The closed anti-self-dual form ``2i d[z.dzbar / (F s^2)]``.

    Raises
    ------
    ValueError
        For ``kappa = 0`` where the form has no normalisable meaning.
    """
    kappa = _kappa(kappa)
    if kappa == 0:
        raise ValueError("l2_form requires kappa > 0")
    F, _ = profiles(kappa)
    s = radius_sq(2)
    return exterior_derivative(zdzbar(2).scale(2j / (F * power(s, 2)))).part(1, 1)


def theta3(kappa: float) -> FormField:
    """Metric dual of the fibre Killing field: ``(i/2F)(z.dzbar - zbar.dz)``."""
    F, _ = profiles(kappa)
    return (zdzbar(2) - zbardz(2)).scale(0.5j / F)


def theta3_identity_residual(kappa: float, z) -> np.ndarray:
    """Pointwise max residual of ``2 d theta_3 - (omega - kappa omega~)``."""
    kappa = _kappa(kappa)
    lhs = exterior_derivative(theta3(kappa)).scale(2.0)
    rhs = kahler_form(kappa)
    if kappa > 0:
        rhs = rhs - l2_form(kappa).scale(kappa)
    return (lhs - rhs).max_abs(z)


def connection_potential(kappa: float, dim: int = 2) -> FormField:
    """The (0,1) potential ``A = sqrt(kappa) z.dzbar / (2 s^2 F)``."""
    kappa = _kappa(kappa)
    F, _ = profiles(kappa)
    s = radius_sq(dim)
    return zdzbar(dim).scale(np.sqrt(kappa) / (2 * F * power(s, 2)))


def connection(ell: int, kappa: float) -> FormField:
    """Imaginary twisting connection ``ell (A - conj(A))``."""
    if int(ell) != ell:
        raise ValueError("ell must be an integer")
    A = connection_potential(kappa)
    return (A - A.conj()).scale(float(ell))


def asinh_potential(kappa: float):
    """``u(z) = arcsinh(sqrt(kappa)/s)``, a potential with ``A = -dbar u / 2``."""

    def u(z):
        s = np.sum(np.abs(np.asarray(z)) ** 2, axis=-1)
        return np.arcsinh(np.sqrt(kappa) / s)

    return u


# -- charts --------------------------------------------------------------------
class BranchCutError(ValueError):
    """Raised when a chart map is evaluated on the cut of the square root."""


@dataclass(frozen=True)
class BundleChartPoint:
    """Bundle coordinates: base ``w = z_1/z_2`` and fibre ``zeta = s z_2/zbar_2``.

    ``sheet`` records which square root of ``zeta`` reproduces ``z``; the
    principal branch (argument in (-pi, pi]) is ``sheet = +1``.
    """

    w: complex
    zeta: complex
    sheet: int = 1

    @property
    def R(self) -> float:
        return abs(self.zeta)

    def r_squared(self, kappa: float) -> float:
        return float(np.sqrt(self.R**2 + kappa))


def _check_cut(zeta):
    if zeta.real < 0 and abs(zeta.imag) <= BRANCH_CUT_TOL * max(1.0, abs(zeta)):
        raise BranchCutError(f"zeta={zeta} lies on the branch cut of sqrt")


def to_bundle(z) -> BundleChartPoint:
    z1, z2 = (complex(c) for c in np.asarray(z, dtype=complex))
    if z2 == 0:
        raise ValueError("the bundle chart needs z_2 != 0")
    s = abs(z1) ** 2 + abs(z2) ** 2
    w = z1 / z2
    zeta = s * z2 / np.conj(z2)
    _check_cut(zeta)
    principal = np.sqrt(zeta) / np.sqrt(1 + abs(w) ** 2)
    sheet = 1 if abs(principal - z2) <= abs(principal + z2) else -1
    return BundleChartPoint(w, zeta, sheet)


def from_bundle(p: BundleChartPoint) -> np.ndarray:
    _check_cut(p.zeta)
    root = p.sheet * np.sqrt(complex(p.zeta)) / np.sqrt(1 + abs(p.w) ** 2)
    return np.array([root * p.w, root], dtype=complex)


@dataclass(frozen=True)
class BiaxialPoint:
    """Bi-axial coordinates ``(r, theta, phi, psi)`` with ``r > kappa^{1/4}``."""

    r: float
    theta: float
    phi: float
    psi: float


def biaxial_to_z(p: BiaxialPoint, kappa: float) -> np.ndarray:
    """Map bi-axial coordinates to ``(z_1, z_2)``.

    ``s = sqrt(r^4 - kappa)``, ``w = cot(theta/2) e^{i phi}`` and
    ``zeta = s e^{i(psi - phi)}``, followed by the principal-branch bundle map.
    """
    kappa = _kappa(kappa)
    if p.r**4 <= kappa:
        raise ValueError("bi-axial coordinates need r > kappa^{1/4}")
    if not (0 < p.theta < np.pi):
        raise ValueError("theta must lie strictly inside (0, pi)")
    s = np.sqrt(p.r**4 - kappa)
    w = np.exp(1j * p.phi) / np.tan(p.theta / 2)
    zeta = s * np.exp(1j * (p.psi - p.phi))
    return from_bundle(BundleChartPoint(w, zeta, 1))


def z_to_biaxial(z, kappa: float) -> BiaxialPoint:
    """Inverse of :func:`biaxial_to_z` up to the overall sign of ``z``."""
    kappa = _kappa(kappa)
    b = to_bundle(z)
    s = abs(b.zeta)
    r = (s**2 + kappa) ** 0.25
    theta = 2 * np.arctan2(1.0, abs(b.w))
    phi = float(np.mod(np.angle(b.w), 2 * np.pi))
    psi = float(np.mod(np.angle(b.zeta) + phi, 2 * np.pi))
    return BiaxialPoint(float(r), float(theta), phi, psi)


def left_invariant_forms(p: BiaxialPoint) -> np.ndarray:
    """Coefficients of ``eta_1, eta_2, eta_3`` on ``(dr, dtheta, dphi, dpsi)``.

    Returns
    -------
    ndarray of shape (3, 4)
    """
    th, ps = p.theta, p.psi
    return np.array(
        [
            [0.0, np.sin(ps), -np.cos(ps) * np.sin(th), 0.0],
            [0.0, -np.cos(ps), -np.sin(ps) * np.sin(th), 0.0],
            [0.0, 0.0, np.cos(th), 1.0],
        ]
    )


def biaxial_metric(p: BiaxialPoint, kappa: float) -> np.ndarray:
    """The bi-axial metric as a 4x4 real matrix on ``(r, theta, phi, psi)``."""
    eta = left_invariant_forms(p)
    lam = 1 - kappa / p.r**4
    dr = np.array([1.0, 0, 0, 0])
    return (
        np.outer(dr, dr) / lam
        + p.r**2 / 4 * lam * np.outer(eta[2], eta[2])
        + p.r**2 / 4 * (np.outer(eta[0], eta[0]) + np.outer(eta[1], eta[1]))
    )


def biaxial_jacobian(p: BiaxialPoint, kappa: float, step: float = 1e-3) -> np.ndarray:
    """``dz/d(r, theta, phi, psi)`` by Richardson-extrapolated central differences.

    Returns
    -------
    ndarray of shape (2, 4), complex
    """
    x0 = np.array([p.r, p.theta, p.phi, p.psi])
    z0 = biaxial_to_z(p, kappa)

    def at(x):
        # stay on the sheet of z0; z -> -z is the deck involution
        z = biaxial_to_z(BiaxialPoint(*x), kappa)
        return z if np.linalg.norm(z - z0) <= np.linalg.norm(z + z0) else -z

    def central(k, h):
        xp, xm = x0.copy(), x0.copy()
        xp[k] += h
        xm[k] -= h
        return (at(xp) - at(xm)) / (2 * h)

    cols = []
    for k in range(4):
        h = step * max(1.0, abs(x0[k])) if k == 0 else step
        cols.append((4 * central(k, h / 2) - central(k, h)) / 3)
    return np.stack(cols, axis=1)


def biaxial_pullback_residual(p: BiaxialPoint, kappa: float, u, v, step: float = 1e-3) -> float:
    """``|g_EH(J u, J v) - u^T B v|`` for the bi-axial matrix ``B`` and real tangents ``u, v``."""
    J = biaxial_jacobian(p, kappa, step)
    z = biaxial_to_z(p, kappa)[None, :]
    Ju, Jv = (J @ np.asarray(u, dtype=float))[None, :], (J @ np.asarray(v, dtype=float))[None, :]
    lhs = float(eh_metric(kappa).real_inner(z, Ju, Jv)[0])
    rhs = float(np.asarray(u) @ biaxial_metric(p, kappa) @ np.asarray(v))
    return abs(lhs - rhs)


# -- profile dump --------------------------------------------------------------
def profile_rows(kappa: float, s_values) -> list:
    """Rows ``(s, F, f, |omega~|^2, |theta_3|^2)`` along the ray ``z = (sqrt(s), 0)``.

    Norms come from the generic pairing; ``|omega~|^2`` is NaN when ``kappa = 0``.
    """
    kappa = _kappa(kappa)
    s_values = np.asarray(s_values, dtype=float)
    z = np.stack([np.sqrt(s_values) + 0j, np.zeros_like(s_values) + 0j], axis=-1)
    g = eh_metric(kappa)
    th = pointwise_norm_sq(theta3(kappa), g).evaluate(z).real
    if kappa > 0:
        om = pointwise_norm_sq(l2_form(kappa), g).evaluate(z).real
    else:
        om = np.full_like(s_values, np.nan)
    F = F_of_s(s_values, kappa)
    f = f_of_s(s_values, kappa)
    return [tuple(float(x) for x in row) for row in zip(s_values, F, f, om, th)]


def profile_csv(kappa: float, s_values) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["s", "F", "f", "omega_tilde_norm_sq", "theta3_norm_sq"])
    for row in profile_rows(kappa, s_values):
        w.writerow([repr(x) for x in row])
    return buf.getvalue()

