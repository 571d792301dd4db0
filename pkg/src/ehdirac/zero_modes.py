"""Closed-form twisted Dirac zero modes, their norms and normalisability classes.

Eguchi-Hanson (n = 1), for a multiplet label ``N`` (``2N`` a non-negative
integer) and ``m`` in ``-N, ..., N``::

    sigma = z_1^{N-m} z_2^{N+m} (z.dzbar) / (F s^{2N+2} f^{ell/2})

solves ``D_A sigma = 0`` for ``A = ell (A - conj A)``.  For general ``n`` the
ansatz ``sigma = P(z) h(s) dbar s`` with ``P`` a monomial of degree ``delta``
leads to ``h = f_n / (F^n s^{delta+n+1})`` with
``(log f_n)' = ell kappa^{n/(n+1)} / (2 F^n s^{n+1})``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import integrate

from . import calabi, eh
from .fields import ONE, RadialProfile, ScalarField, coord, power, prod_fields, radius_sq, sum_fields
from .forms import FormField, pointwise_norm_sq, twisted_dirac
from .metric import HermitianMetricField

__all__ = [
    "NormClass",
    "ZeroModeSpec",
    "eh_spec",
    "general_spec",
    "eh_zero_mode",
    "eh_norm_sq",
    "classify_eh",
    "count_eh",
    "multiplet_dim",
    "admissible_m",
    "log_fn",
    "fn_profile",
    "general_zero_mode",
    "general_h",
    "ode_residual",
    "classify_general",
    "mode_setup",
    "residual_ratio",
    "su2_equivariance_residual",
    "mode_table_rows",
    "mode_table_csv",
]


class NormClass(enum.Enum):
    """Normalisability of a zero mode."""

    NORMALISABLE = "Normalisable"
    LOG_DIVERGENT = "LogDivergent"
    POWER_DIVERGENT_AT_ZERO = "PowerDivergentAtZero"
    DIVERGENT_AT_INFINITY = "DivergentAtInfinity"

    def __str__(self):
        return self.value


def _half_integer(x) -> Fraction:
    fr = Fraction(x).limit_denominator(2)
    if abs(float(fr) - float(x)) > 1e-12 or fr.denominator not in (1, 2):
        raise ValueError(f"{x} is not a half-integer")
    return fr


@dataclass(frozen=True)
class ZeroModeSpec:
    """Discrete data selecting one closed-form zero mode.

    For ``n = 1`` give ``N`` and ``m`` (half-integers); the exponent vector is
    then ``(N - m, N + m)``.  For ``n > 1`` give ``exponents`` directly.
    """

    n: int
    ell: int
    kappa: float
    N: Fraction | None = None
    m: Fraction | None = None
    exponents: tuple = field(default=())

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("n must be a positive integer")
        if int(self.ell) != self.ell:
            raise ValueError("ell must be an integer")
        if self.ell < 0:
            raise NotImplementedError("negative ell is not covered by the closed forms")
        if not np.isfinite(self.kappa) or self.kappa < 0:
            raise ValueError("kappa must be a finite non-negative real")
        if self.N is not None:
            N = _half_integer(self.N)
            m = _half_integer(self.m if self.m is not None else 0)
            if N < 0 or abs(m) > N or (N - m).denominator != 1:
                raise ValueError(f"invalid multiplet label N={N}, m={m}")
            object.__setattr__(self, "N", N)
            object.__setattr__(self, "m", m)
            exps = (int(N - m), int(N + m))
            if self.n != 1:
                raise ValueError("(N, m) labels are for n = 1")
            if self.exponents and tuple(self.exponents) != exps:
                raise ValueError("exponents disagree with (N, m)")
            object.__setattr__(self, "exponents", exps)
        exps = tuple(int(e) for e in self.exponents)
        if len(exps) != self.n + 1 or any(e < 0 for e in exps) or any(e != x for e, x in zip(exps, self.exponents)):
            raise ValueError(f"need {self.n + 1} non-negative integer exponents, got {self.exponents}")
        object.__setattr__(self, "exponents", exps)
        object.__setattr__(self, "ell", int(self.ell))
        object.__setattr__(self, "kappa", float(self.kappa))

    @property
    def delta(self) -> int:
        return sum(self.exponents)

    @property
    def dim(self) -> int:
        return self.n + 1

    def label(self) -> str:
        if self.n == 1 and self.N is not None:
            return f"N={self.N},m={self.m},ell={self.ell},kappa={self.kappa:g}"
        return f"n={self.n},exp={list(self.exponents)},ell={self.ell},kappa={self.kappa:g}"


def eh_spec(N, m, ell: int, kappa: float) -> ZeroModeSpec:
    return ZeroModeSpec(1, ell, kappa, N=Fraction(N), m=Fraction(m))


def general_spec(exponents, ell: int, kappa: float) -> ZeroModeSpec:
    exponents = tuple(exponents)
    return ZeroModeSpec(len(exponents) - 1, ell, kappa, exponents=exponents)


def _monomial(exponents) -> ScalarField:
    return prod_fields(*[power(coord(i), e) for i, e in enumerate(exponents) if e])


# -- Eguchi-Hanson ---------------------------------------------------------------
def eh_zero_mode(spec: ZeroModeSpec) -> FormField:
    """The n = 1 zero mode ``P (z.dzbar) / (F s^{2N+2} f^{ell/2})``."""
    if spec.n != 1 or spec.N is None:
        raise ValueError("eh_zero_mode needs an n = 1 spec with (N, m)")
    F, f = eh.profiles(spec.kappa)
    s = radius_sq(2)
    two_n = int(2 * spec.N)
    h = power(F, -1) * power(s, -(two_n + 2))
    if spec.ell and spec.kappa > 0:
        h = h * power(f, -spec.ell / 2, real_base=True)
    return eh.zdzbar(2).scale(_monomial(spec.exponents) * h)


def eh_norm_sq(spec: ZeroModeSpec, z) -> np.ndarray:
    """Closed form ``|z_1|^{2(N-m)} |z_2|^{2(N+m)} / (F s^{4N+3} f^ell)``."""
    if spec.n != 1 or spec.N is None:
        raise ValueError("eh_norm_sq needs an n = 1 spec with (N, m)")
    z = np.asarray(z, dtype=complex)
    s = np.sum(np.abs(z) ** 2, axis=-1)
    a, b = spec.exponents
    F = eh.F_of_s(s, spec.kappa)
    f = eh.f_of_s(s, spec.kappa)
    return np.abs(z[..., 0]) ** (2 * a) * np.abs(z[..., 1]) ** (2 * b) / (F * s ** (4 * float(spec.N) + 3) * f**spec.ell)


def classify_eh(N, ell: int) -> NormClass:
    """Exponent comparison: normalisable iff ``2N + 1 <= ell``."""
    two_n = int(2 * _half_integer(N))
    if two_n < 0:
        raise ValueError("N must be non-negative")
    if ell < 0:
        raise NotImplementedError("negative ell is not covered by the closed forms")
    if two_n < ell:
        return NormClass.NORMALISABLE
    if two_n == ell:
        return NormClass.LOG_DIVERGENT
    return NormClass.POWER_DIVERGENT_AT_ZERO


def multiplet_dim(N) -> int:
    return int(2 * _half_integer(N)) + 1


def admissible_m(N):
    N = _half_integer(N)
    return [N - k for k in range(int(2 * N) + 1)][::-1]


def count_eh(ell: int) -> int:
    """Number of normalisable zero modes, enumerated through :func:`classify_eh`."""
    total = 0
    two_n = 0
    while True:
        N = Fraction(two_n, 2)
        cls = classify_eh(N, ell)
        if cls is NormClass.NORMALISABLE:
            total += multiplet_dim(N)
        elif two_n > ell:
            return total
        two_n += 1


# -- general n -----------------------------------------------------------------
def _fn_logderiv(s, n, ell, kappa):
    F = calabi.general_F_of_s(s, n, kappa)
    return ell * kappa ** (n / (n + 1)) / (2 * F**n * s ** (n + 1))


@lru_cache(maxsize=65536)
def _log_fn_scalar(s: float, n: int, ell: int, kappa: float) -> float:
    if s == 1.0 or ell == 0 or kappa == 0:
        return 0.0
    # integrate in log s for a well-scaled integrand
    val, _err = integrate.quad(
        lambda t: _fn_logderiv(np.exp(t), n, ell, kappa) * np.exp(t), 0.0, math.log(s), epsabs=1e-14, epsrel=1e-13, limit=200
    )
    return val


def log_fn(s, n: int, ell: int, kappa: float) -> np.ndarray:
    """``log f_n(s)`` with ``f_n(1) = 1``, by adaptive quadrature of its log-derivative."""
    s = np.asarray(s, dtype=float)
    flat = [_log_fn_scalar(float(x), int(n), int(ell), float(kappa)) for x in s.ravel()]
    return np.array(flat).reshape(s.shape)


def fn_profile(n: int, ell: int, kappa: float) -> ScalarField:
    """``f_n`` as a radial field (numeric values, analytic derivative rule)."""
    if ell == 0 or kappa == 0:
        return ONE
    s = radius_sq(n + 1)
    F, _ = calabi.general_profile(n, kappa)
    logderiv = (ell * kappa ** (n / (n + 1)) / 2) * power(F, -n) * power(s, -(n + 1))
    return RadialProfile(lambda x: np.exp(log_fn(x, n, ell, kappa)), logderiv, n + 1, name=f"f_{n}")


def general_h(spec: ZeroModeSpec) -> ScalarField:
    """``h = f_n / (F^n s^{delta+n+1})``."""
    F, _ = calabi.general_profile(spec.n, spec.kappa)
    s = radius_sq(spec.dim)
    return fn_profile(spec.n, spec.ell, spec.kappa) * power(F, -spec.n) * power(s, -(spec.delta + spec.n + 1))


def general_zero_mode(spec: ZeroModeSpec) -> FormField:
    """``P(z) h(s) dbar s`` with ``dbar s = z.dzbar``."""
    return eh.zdzbar(spec.dim).scale(_monomial(spec.exponents) * general_h(spec))


def ode_residual(n: int, h: ScalarField, delta: int, ell: int, kappa: float) -> ScalarField:
    """``F^{n+1}((delta+1) h + h' s) + n h - ell kappa^{n/(n+1)} h F / (2 s^n)``.

    ``h' s`` is computed as the Euler derivative ``sum_mu z_mu d_mu h`` of the
    radial field ``h``.
    """
    dim = n + 1
    F, _ = calabi.general_profile(n, kappa)
    s = radius_sq(dim)
    hps = sum_fields(*[coord(m) * h.dz(m) for m in range(dim)])
    return sum_fields(
        power(F, n + 1) * ((delta + 1) * h + hps),
        n * h,
        -(ell * kappa ** (n / (n + 1)) / 2) * h * F * power(s, -n),
    )


def classify_general(delta: int, ell: int, n: int) -> NormClass:
    """Normalisable iff ``ell > delta``; small-s exponent ``2 ell - 2 delta - 1`` in ``r``."""
    if n < 1 or delta < 0:
        raise ValueError("need n >= 1 and delta >= 0")
    if ell < 0:
        raise NotImplementedError("negative ell is not covered by the closed forms")
    if ell > delta:
        return NormClass.NORMALISABLE
    if ell == delta:
        return NormClass.LOG_DIVERGENT
    return NormClass.POWER_DIVERGENT_AT_ZERO


# -- verification helpers -----------------------------------------------------
def mode_setup(spec: ZeroModeSpec):
    """Return ``(sigma, connection, metric)`` for a spec."""
    if spec.n == 1 and spec.N is not None:
        sigma = eh_zero_mode(spec)
        g: HermitianMetricField = eh.eh_metric(spec.kappa)
        conn = eh.connection(spec.ell, spec.kappa) if spec.kappa > 0 else FormField(2)
    else:
        sigma = general_zero_mode(spec)
        g = calabi.calabi_metric(spec.n, spec.kappa)
        conn = calabi.connection_general(spec.n, spec.ell, spec.kappa)
    return sigma, conn, g


def residual_ratio(spec: ZeroModeSpec, z) -> dict:
    """Pointwise ``|D_A sigma| / |sigma|`` split into degree parts.

    Returns
    -------
    dict
        ``ratio`` (total), ``lambda0`` and ``lambda02`` arrays.
    """
    sigma, conn, g = mode_setup(spec)
    D = twisted_dirac(sigma, conn, g)
    norm = np.sqrt(pointwise_norm_sq(sigma, g).evaluate(z).real)
    parts = {}
    for name, (p, q) in (("lambda0", (0, 0)), ("lambda02", (0, 2))):
        part = D.part(p, q)
        parts[name] = np.sqrt(np.maximum(pointwise_norm_sq(part, g).evaluate(z).real, 0)) / norm
    parts["ratio"] = np.sqrt(np.maximum(pointwise_norm_sq(D, g).evaluate(z).real, 0)) / norm
    return parts


def su2_equivariance_residual(N, ell: int, kappa: float, U, z) -> float:
    """Relative least-squares residual of the pullback of each ``(N, m)`` mode.

    For ``U`` in SU(2) the pullback of the mode by ``z -> U z`` is fitted by
    the span of ``{(N, m')}`` modes on the sample points ``z``.
    """
    N = _half_integer(N)
    U = np.asarray(U, dtype=complex)
    z = np.asarray(z, dtype=complex)
    Uz = z @ U.T
    ms = admissible_m(N)
    modes = [eh_zero_mode(eh_spec(N, m, ell, kappa)) for m in ms]

    def coeffs(form, pts):
        return np.stack([form.coefficient((), (j,)).evaluate(pts) for j in range(2)], axis=-1)

    basis = np.stack([coeffs(md, z).ravel() for md in modes], axis=-1)
    worst = 0.0
    for md in modes:
        # (U^* sigma)_nu(z) = sum_mu sigma_mu(Uz) conj(U)[mu, nu]
        pulled = (coeffs(md, Uz) @ np.conj(U)).ravel()
        sol, *_ = np.linalg.lstsq(basis, pulled, rcond=None)
        res = np.linalg.norm(basis @ sol - pulled) / np.linalg.norm(pulled)
        worst = max(worst, float(res))
    return worst


def mode_table_rows(specs, z, with_l2: bool = True) -> list:
    """Rows ``(n, delta_or_N, m, ell, kappa, class, residual_max, l2_norm_or_nan)``."""
    from .l2 import l2_integral

    rows = []
    for spec in specs:
        if spec.n == 1 and spec.N is not None:
            label, m = str(spec.N), str(spec.m)
            cls = classify_eh(spec.N, spec.ell)
        else:
            label, m = str(spec.delta), ""
            cls = classify_general(spec.delta, spec.ell, spec.n)
        res = float(np.max(residual_ratio(spec, z)["ratio"]))
        l2 = float("nan")
        if with_l2 and cls is NormClass.NORMALISABLE:
            l2 = l2_integral(spec).value
        rows.append((spec.n, label, m, spec.ell, spec.kappa, str(cls), res, l2))
    return rows


def mode_table_csv(rows) -> str:
    import csv
    import io

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "delta_or_N", "m", "ell", "kappa", "class", "residual_max", "l2_norm_or_nan"])
    for r in rows:
        w.writerow([r[0], r[1], r[2], r[3], repr(r[4]), r[5], repr(r[6]), repr(r[7])])
    return buf.getvalue()
