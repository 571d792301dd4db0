"""L^2 norms by radial quadrature, divergence detection and flux integrals.

Both metrics have unit determinant in the symmetric chart, so volumes are flat
Lebesgue volumes on C^{n+1}:

    int phi = (pi^{n+1} / n!) int_0^oo s^n <phi>(s) ds,

with ``<phi>`` the average over the unit sphere.  Norm values refer to the
chart C^{n+1} itself, i.e. to the double cover when ``n = 1``.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate, optimize

from . import calabi, eh
from .fields import coord, coordbar, power, radius_sq
from .forms import FormField, exterior_derivative
from .zero_modes import NormClass, ZeroModeSpec, classify_eh, classify_general, eh_spec, general_spec

__all__ = [
    "QuadratureError",
    "FluxInconsistencyError",
    "RadialIntegrand",
    "L2Result",
    "FluxTask",
    "FluxResult",
    "angular_average",
    "angular_average_mc",
    "cutoff_analysis",
    "eh_integrand",
    "general_integrand",
    "l2_integral_eh",
    "l2_integral_general",
    "l2_integral",
    "l2_norm_form",
    "unit_log_fn",
    "flux",
    "flux_engine",
    "disk_flux_closed_form",
    "gauge_shift_flux_change",
    "measure_check",
    "classification_sweep",
    "results_csv",
    "results_json",
]

S_MAX = 1.0e4
CUTOFFS = tuple(10.0 ** (-k) for k in range(1, 7))
EPSABS = 1e-9
EPSREL = 1e-8
FLUX_TOL = 1e-6


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach its tolerance (distinct from divergence)."""


class FluxInconsistencyError(ValueError):
    """A flux integral is not within tolerance of an integer."""


# -- angular factors -------------------------------------------------------------
def angular_average(*exponents) -> float:
    """Average of ``prod |z_i|^{2 a_i} / s^{sum a}`` over the unit sphere in C^{n+1}.

    Equals ``n! prod a_i! / (n + sum a)!``; for two exponents this is
    ``a! b! / (a + b + 1)!``.
    """
    if len(exponents) == 1 and np.ndim(exponents[0]) == 1:
        exponents = tuple(exponents[0])
    a = [int(x) for x in exponents]
    if len(a) < 2 or any(x < 0 for x in a):
        raise ValueError("need at least two non-negative integer exponents")
    n = len(a) - 1
    num = math.factorial(n) * math.prod(math.factorial(x) for x in a)
    return num / math.factorial(n + sum(a))


def angular_average_mc(exponents, samples: int, rng: np.random.Generator) -> float:
    """Monte-Carlo estimate of :func:`angular_average` (oracle)."""
    a = np.asarray(exponents)
    v = rng.normal(size=(samples, len(a))) + 1j * rng.normal(size=(samples, len(a)))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return float(np.mean(np.prod(np.abs(v) ** (2 * a), axis=1)))


# -- radial integrands ----------------------------------------------------------
@dataclass(frozen=True)
class RadialIntegrand:
    """``s -> profile(s)``, including the measure, with declared asymptotics.

    Attributes
    ----------
    small_s_exponent : Fraction
        ``profile ~ s^p`` as ``s -> 0``.
    large_s_decay : tuple
        ``("power", alpha)`` for ``profile ~ s^{-alpha}`` as ``s -> oo``.
    """

    profile: Callable[[np.ndarray], np.ndarray]
    small_s_exponent: Fraction
    large_s_decay: tuple
    name: str = "integrand"

    def __call__(self, s):
        return self.profile(np.asarray(s, dtype=float))

    def numeric_slopes(self, small=(1e-8, 1e-7), large=(1e6, 1e7)) -> tuple:
        def slope(a, b):
            return float(np.log(self(b) / self(a)) / np.log(b / a))

        return slope(*small), slope(*large)

    def check_slopes(self, rtol: float = 0.05) -> bool:
        """Declared exponents agree with numeric log-log slopes to ``rtol``."""
        lo, hi = self.numeric_slopes()
        p = float(self.small_s_exponent)
        alpha = float(self.large_s_decay[1])
        return abs(lo - p) <= rtol * max(1.0, abs(p)) and abs(hi + alpha) <= rtol * max(1.0, alpha)


@dataclass
class L2Result:
    """Tagged outcome of an L^2 computation.

    ``value`` is the integral when finite and ``inf`` otherwise.
    """

    label: str
    tag: NormClass
    value: float
    error_estimate: float
    cutoffs: list = field(default_factory=list)
    partial_integrals: list = field(default_factory=list)
    fitted_exponent: float = float("nan")
    model_rss: dict = field(default_factory=dict)

    @property
    def finite(self) -> bool:
        return self.tag is NormClass.NORMALISABLE

    def record(self) -> dict:
        return {
            "spec": self.label,
            "tag": str(self.tag),
            "value": self.value,
            "error_estimate": self.error_estimate,
        }


def _quad(fn, a, b, label):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(fn, a, b, epsabs=EPSABS, epsrel=EPSREL, limit=400)
        except integrate.IntegrationWarning as exc:
            raise QuadratureError(f"{label}: {exc}") from exc
    if not np.isfinite(val):
        raise QuadratureError(f"{label}: non-finite result")
    return val, err


def _log_quad(integrand: RadialIntegrand, s0, s1):
    # integrate in t = log s
    return _quad(lambda t: float(integrand(np.exp(t))) * math.exp(t), math.log(s0), math.log(s1), integrand.name)


def _tail(integrand: RadialIntegrand, s_max: float):
    alpha = float(integrand.large_s_decay[1])
    if integrand.large_s_decay[0] != "power" or alpha <= 1:
        return math.inf, math.inf
    near = float(integrand(s_max)) * s_max / (alpha - 1)
    far_quad, far_err = _log_quad(integrand, s_max, 10 * s_max)
    far = far_quad + float(integrand(10 * s_max)) * 10 * s_max / (alpha - 1)
    return far, abs(far - near) + far_err


def _fit_models(eps: np.ndarray, I: np.ndarray) -> dict:
    """Least-squares fits of ``I(eps)`` to ``a + b phi(eps)`` for the three families."""
    scale = max(np.max(np.abs(I)), 1e-300)
    y = I / scale

    def rss_for(phi):
        A = np.stack([np.ones_like(phi), phi], axis=1)
        coef, *_ = np.linalg.lstsq(A, y, rcond=None)
        return float(np.sum((A @ coef - y) ** 2))

    out = {"log": (rss_for(np.log(1 / eps)), 0.0)}
    for name, sign in (("finite", 1.0), ("power", -1.0)):
        res = optimize.minimize_scalar(
            lambda q: rss_for(eps ** (sign * q)), bounds=(0.5, 10.0), method="bounded", options={"xatol": 1e-6}
        )
        out[name] = (float(res.fun), float(res.x))
    return out


def _select(models: dict) -> str:
    best = min(v[0] for v in models.values())
    # simplest model within a hair of the best wins
    for name in ("finite", "log", "power"):
        if models[name][0] <= best + 1e-12:
            return name
    return "finite"  # pragma: no cover


def cutoff_analysis(integrand: RadialIntegrand, label: str = "", s_max: float = S_MAX, cutoffs=CUTOFFS) -> L2Result:
    """Integrate on ``[eps_k, s_max]`` plus a tail bound and classify the ``eps -> 0`` behaviour.

    The cutoff sequence ``eps_k = 10^{-k}`` is fitted against a convergent
    power correction, ``log(1/eps)`` and ``eps^{-p}``; the smallest residual
    wins, ties going to the simpler model.
    """
    cutoffs = sorted(cutoffs, reverse=True)
    main, err = _log_quad(integrand, cutoffs[0], s_max)
    tail, tail_err = _tail(integrand, s_max)
    if not np.isfinite(tail):
        return L2Result(label or integrand.name, NormClass.DIVERGENT_AT_INFINITY, math.inf, math.inf)
    partial = [main + tail]
    errs = [err + tail_err]
    for hi, lo in zip(cutoffs[:-1], cutoffs[1:]):
        seg, seg_err = _log_quad(integrand, lo, hi)
        partial.append(partial[-1] + seg)
        errs.append(errs[-1] + seg_err)
    eps = np.array(cutoffs)
    I = np.array(partial)
    models = _fit_models(eps, I)
    choice = _select(models)
    tag = {
        "finite": NormClass.NORMALISABLE,
        "log": NormClass.LOG_DIVERGENT,
        "power": NormClass.POWER_DIVERGENT_AT_ZERO,
    }[choice]
    value, error = math.inf, math.inf
    if tag is NormClass.NORMALISABLE:
        # power-law head on [0, eps_min], bounded by itself
        p = float(integrand.small_s_exponent)
        head = float(integrand(cutoffs[-1])) * cutoffs[-1] / (p + 1) if p > -1 else math.inf
        value, error = I[-1] + head, errs[-1] + abs(head)
    exponent = models[choice][1] if choice != "log" else 0.0
    return L2Result(
        label or integrand.name,
        tag,
        float(value),
        float(error),
        cutoffs=list(map(float, eps)),
        partial_integrals=list(map(float, I)),
        fitted_exponent=float(exponent),
        model_rss={k: v[0] for k, v in models.items()},
    )


# -- zero-mode integrands ---------------------------------------------------------
def _flat_measure(n: int) -> float:
    return math.pi ** (n + 1) / math.factorial(n)


def eh_integrand(spec: ZeroModeSpec) -> RadialIntegrand:
    """``pi^2 s <|sigma|^2>`` for an EH mode: ``pi^2 c / (F s^{2N+2} f^ell)``."""
    if spec.n != 1 or spec.N is None:
        raise ValueError("eh_integrand needs an n = 1 spec with (N, m)")
    c = _flat_measure(1) * angular_average(*spec.exponents)
    two_n = int(2 * spec.N)
    k, ell = spec.kappa, spec.ell

    def profile(s):
        return c / (eh.F_of_s(s, k) * s ** (two_n + 2) * eh.f_of_s(s, k) ** ell)

    small = Fraction(ell - two_n - 1) if k > 0 else Fraction(-two_n - 2)
    return RadialIntegrand(profile, small, ("power", Fraction(two_n + 2)), name=spec.label())


@lru_cache(maxsize=64)
def _unit_log_fn_solution(n: int, kappa: float):
    k = kappa / 1.0

    def rhs(t, y):
        s = math.exp(t)
        return [0.5 * (k / (s ** (n + 1) + k)) ** (n / (n + 1))]

    lo, hi = math.log(1e-9), math.log(1e6)
    opts = dict(method="DOP853", rtol=1e-13, atol=1e-15, dense_output=True)
    down = integrate.solve_ivp(rhs, (0.0, lo), [0.0], **opts)
    up = integrate.solve_ivp(rhs, (0.0, hi), [0.0], **opts)
    if not (down.success and up.success):
        raise QuadratureError(f"log f_n integration failed for n={n}, kappa={kappa}")
    return down.sol, up.sol, lo, hi, float(down.sol(lo)[0]), float(up.sol(hi)[0])


def unit_log_fn(s, n: int, kappa: float) -> np.ndarray:
    """``log f_n / ell``, from one dense ODE solve per ``(n, kappa)``.

    ``d(log f_n)/d(log s) = (ell/2) (kappa/(s^{n+1} + kappa))^{n/(n+1)}``;
    outside the solved window the asymptotic slopes ``1/2`` and ``0`` are used.
    """
    s = np.asarray(s, dtype=float)
    if kappa == 0:
        return np.zeros_like(s)
    down, up, lo, hi, y_lo, y_hi = _unit_log_fn_solution(int(n), float(kappa))
    t = np.log(s)
    out = np.empty_like(t)
    neg = t < 0
    if np.any(neg):
        tn = np.maximum(t[neg], lo)
        out[neg] = down(tn)[0] + 0.5 * (t[neg] - tn)
    if np.any(~neg):
        out[~neg] = up(np.minimum(t[~neg], hi))[0]
    return out


def general_integrand(spec: ZeroModeSpec) -> RadialIntegrand:
    """``(pi^{n+1}/n!) c s^n <|sigma|^2>`` with ``|sigma|^2 = |P|^2 f_n^2 / (F^n s^{2 delta + 2n + 1})``."""
    n, d, ell, k = spec.n, spec.delta, spec.ell, spec.kappa
    c = _flat_measure(n) * angular_average(*spec.exponents)

    def profile(s):
        F = calabi.general_F_of_s(s, n, k)
        return c * np.exp(2 * ell * unit_log_fn(s, n, k)) / (F**n * s ** (d + n + 1))

    small = Fraction(ell - d - 1) if k > 0 else Fraction(-d - n - 1)
    return RadialIntegrand(profile, small, ("power", Fraction(d + n + 1)), name=spec.label())


@lru_cache(maxsize=4096)
def _cached_eh(N2: int, ell: int, kappa: float) -> L2Result:
    spec = eh_spec(Fraction(N2, 2), Fraction(N2 % 2, 2), ell, kappa)
    return cutoff_analysis(eh_integrand(spec))


@lru_cache(maxsize=4096)
def _cached_general(n: int, delta: int, ell: int, kappa: float) -> L2Result:
    spec = general_spec((delta,) + (0,) * n, ell, kappa)
    return cutoff_analysis(general_integrand(spec))


def _rescale(base: L2Result, factor: float, label: str) -> L2Result:
    return L2Result(
        label,
        base.tag,
        base.value * factor,
        base.error_estimate * factor,
        cutoffs=list(base.cutoffs),
        partial_integrals=[x * factor for x in base.partial_integrals],
        fitted_exponent=base.fitted_exponent,
        model_rss=dict(base.model_rss),
    )


def l2_integral_eh(spec: ZeroModeSpec) -> L2Result:
    """``int |sigma|^2`` over the EH chart for a closed-form zero mode.

    The radial analysis depends on ``(N, ell, kappa)`` only and is cached; the
    angular factor for ``m`` rescales it.
    """
    if spec.n != 1 or spec.N is None:
        raise ValueError("l2_integral_eh needs an n = 1 spec")
    N2 = int(2 * spec.N)
    base = _cached_eh(N2, spec.ell, spec.kappa)
    ref = angular_average(N2 - N2 // 2, N2 // 2)
    return _rescale(base, angular_average(*spec.exponents) / ref, spec.label())


def l2_integral_general(spec: ZeroModeSpec) -> L2Result:
    base = _cached_general(spec.n, spec.delta, spec.ell, spec.kappa)
    ref = angular_average((spec.delta,) + (0,) * spec.n)
    return _rescale(base, angular_average(*spec.exponents) / ref, spec.label())


def l2_integral(spec: ZeroModeSpec) -> L2Result:
    if spec.n == 1 and spec.N is not None:
        return l2_integral_eh(spec)
    return l2_integral_general(spec)


# -- harmonic forms -------------------------------------------------------------
def l2_norm_form(which: str, n: int, kappa: float) -> L2Result:
    """``int |omega~|^2`` (``which="omega_tilde"``) or ``int |beta|^2`` (``"beta"``).

    Uses the closed-form pointwise norms, which agree with the generic pairing
    wherever the latter is well conditioned; near ``s = 0`` the symbolic
    coefficients of ``omega~`` cancel catastrophically.
    """
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    calabi.CalabiParams(n, kappa)
    c = _flat_measure(n)
    if which == "omega_tilde":
        norm = calabi.l2_form_norm_sq_closed
        small, alpha = Fraction(n), Fraction(n + 2)
    elif which == "beta":
        norm = calabi.beta_norm_sq_closed
        small, alpha = Fraction(-1), Fraction(n + 1)
    else:
        raise ValueError(f"unknown form {which!r}")

    def profile(s):
        return c * s**n * norm(s, n, kappa)

    return cutoff_analysis(RadialIntegrand(profile, small, ("power", alpha), name=f"{which}(n={n},kappa={kappa:g})"))


# -- flux -------------------------------------------------------------------------
@dataclass(frozen=True)
class FluxTask:
    n: int
    ell: int
    kappa: float

    def __post_init__(self):
        calabi.CalabiParams(self.n, self.kappa)
        if int(self.ell) != self.ell:
            raise ValueError("ell must be an integer")
        if self.kappa <= 0:
            raise ValueError("flux needs kappa > 0")


@dataclass
class FluxResult:
    task: FluxTask
    value: float
    error_estimate: float
    method: str

    @property
    def nearest_integer(self) -> int:
        return int(round(self.value))

    @property
    def defect(self) -> float:
        return abs(self.value - self.nearest_integer)


def flux(task: FluxTask, paper_sign: bool = False, tol: float = FLUX_TOL) -> FluxResult:
    """``(i/2pi) int_Sigma dA`` over the generator sphere from the restriction formula.

    On ``Sigma`` (the ``w``-plane, compactified by ``|w| = tan u``)
    ``d alpha = 2i (n+1) dx dy / (1+|w|^2)^2`` and ``dA|_Sigma = -ell d alpha/(n+1)``.
    ``paper_sign=True`` uses the opposite sign and returns ``-ell``.
    """
    sign = 1.0 if paper_sign else -1.0
    n1 = task.n + 1

    def density(u, phi):
        # dA(d_x, d_y) dx dy in (u, phi): rho drho = tan(u) sec(u)^2 du
        rho = math.tan(u)
        d_alpha = 2j * n1 / (1 + rho * rho) ** 2
        dA = sign * task.ell * d_alpha / n1
        return dA * rho / math.cos(u) ** 2

    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.dblquad(
                lambda u, phi: (1j / (2 * math.pi) * density(u, phi)).real, 0.0, 2 * math.pi, 0.0, math.pi / 2,
                epsabs=1e-12, epsrel=1e-12,
            )
        except integrate.IntegrationWarning as exc:
            raise QuadratureError(str(exc)) from exc
    res = FluxResult(task, float(val), float(err), "restriction" + ("-paper-sign" if paper_sign else ""))
    if res.defect > tol:
        raise FluxInconsistencyError(f"flux {val} is not within {tol} of an integer")
    return res


def _disk_map(n: int, eps: float, x, y):
    """``z = sqrt(eps)(w, 1, 0, ...)/sqrt(1+|w|^2)`` and its real partials."""
    w = x + 1j * y
    r2 = 1 + np.abs(w) ** 2
    v = np.zeros(np.shape(w) + (n + 1,), dtype=complex)
    v[..., 0] = w
    v[..., 1] = 1.0
    root = np.sqrt(eps / r2)[..., None]
    z = root * v
    e0 = np.zeros(n + 1, dtype=complex)
    e0[0] = 1.0
    zx = root * (e0 - v * (x / r2)[..., None])
    zy = root * (1j * e0 - v * (y / r2)[..., None])
    return z, zx, zy


def _two_form_on(form: FormField, z, X, Y) -> np.ndarray:
    """``form(X, Y)`` for a 2-form at points ``z``, vectors given by ``dz`` components."""
    vals = form.evaluate(z)
    out = np.zeros(np.shape(z)[:-1], dtype=complex)
    for (I, J), c in vals.items():
        if len(I) + len(J) != 2:
            raise ValueError("expected a 2-form")
        f = [(i, False) for i in I] + [(j, True) for j in J]

        def ev(k, V):
            idx, bar = f[k]
            return np.conj(V[..., idx]) if bar else V[..., idx]

        out = out + c * (ev(0, X) * ev(1, Y) - ev(0, Y) * ev(1, X))
    return out


def disk_flux_closed_form(n: int, ell: int, kappa: float, eps: float) -> float:
    """Stokes value of the disk flux at ``s = eps``: ``ell (kappa/(kappa + eps^{n+1}))^{n/(n+1)}``."""
    return ell * (kappa / (kappa + eps ** (n + 1))) ** (n / (n + 1))


def flux_engine(
    task: FluxTask, eps: float = 1e-4, connection: FormField | None = None, nodes: tuple = (120, 48)
) -> FluxResult:
    """``(i/2pi) int dA`` over the ``w``-disk at ``s = eps``, with ``dA`` from the form engine.

    As ``eps -> 0`` the disk closes up onto the generator sphere; the exact
    value at finite ``eps`` is :func:`disk_flux_closed_form`.  Quadrature is
    Gauss-Legendre in ``u`` (``|w| = tan u``) and trapezoidal in the angle.
    """
    conn = connection if connection is not None else calabi.connection_general(task.n, task.ell, task.kappa)
    dA = exterior_derivative(conn)
    val = _disk_integral(dA, task.n, eps, nodes)
    coarse = _disk_integral(dA, task.n, eps, (nodes[0] // 2, nodes[1] // 2))
    return FluxResult(task, val, abs(val - coarse), f"engine-disk(eps={eps:g})")


def _disk_integral(dA: FormField, n: int, eps: float, nodes) -> float:
    nu, nphi = nodes
    xg, wg = np.polynomial.legendre.leggauss(nu)
    u = (xg + 1) * math.pi / 4
    wu = wg * math.pi / 4
    phi = np.arange(nphi) * 2 * math.pi / nphi
    U, P = np.meshgrid(u, phi, indexing="ij")
    rho = np.tan(U)
    x, y = rho * np.cos(P), rho * np.sin(P)
    z, zx, zy = _disk_map(n, eps, x, y)
    dens = _two_form_on(dA, z, zx, zy) * rho / np.cos(U) ** 2
    total = np.sum(wu[:, None] * dens) * 2 * math.pi / nphi
    return float((1j / (2 * math.pi) * total).real)


def gauge_shift_flux_change(task: FluxTask, eps: float = 1e-4) -> float:
    """Flux change when ``A -> A + i d chi`` for a smooth decaying real ``chi``."""
    d = task.n + 1
    chi = coord(0) * coordbar(0) * power(1 + radius_sq(d), -2)
    dchi = FormField(d, {**{((m,), ()): chi.dz(m) for m in range(d)}, **{((), (m,)): chi.dzbar(m) for m in range(d)}})
    base = calabi.connection_general(task.n, task.ell, task.kappa)
    shifted = base + dchi.scale(1j)
    return abs(flux_engine(task, eps, shifted).value - flux_engine(task, eps, base).value)


# -- measure ------------------------------------------------------------------------
def measure_check(kappa: float, radius: float, samples: int, rng: np.random.Generator) -> dict:
    """Monte-Carlo volume of ``{|z| < radius}`` under the EH metric vs ``pi^2 R^4 / 2``.

    The density is ``sqrt(det)`` of the real Gram matrix built from
    ``Re(u^T G conj(v))`` on the real coordinate basis.
    """
    x = rng.uniform(-radius, radius, size=(samples, 4))
    z = x[:, 0::2] + 1j * x[:, 1::2]
    inside = np.sum(x**2, axis=1) < radius**2
    z = z[inside & (np.sum(x**2, axis=1) > 0)]
    G = eh.eh_metric(kappa).matrix(z)
    basis = np.array([[1, 0], [1j, 0], [0, 1], [0, 1j]], dtype=complex)
    gram = np.real(np.einsum("ka,nab,lb->nkl", basis, G, np.conj(basis)))
    density = np.sqrt(np.linalg.det(gram))
    vol = (2 * radius) ** 4 * np.sum(density) / samples
    flat = math.pi**2 * radius**4 / 2
    return {"volume": float(vol), "flat_volume": flat, "relative_error": abs(vol - flat) / flat}


# -- sweeps and tables ----------------------------------------------------------------
def classification_sweep(kappa: float = 1.0, ell_max: int = 5, two_n_max: int = 6, delta_max: int = 4, ns=(2, 3)) -> list:
    """Compare analytic classes with quadrature tags on the standard sweep.

    Returns
    -------
    list of dict
        One row per spec with ``analytic``, ``quadrature`` and ``agree``.
    """
    rows = []
    for ell in range(ell_max + 1):
        for two_n in range(two_n_max + 1):
            N = Fraction(two_n, 2)
            for k in range(two_n + 1):
                spec = eh_spec(N, -N + k, ell, kappa)
                r = l2_integral_eh(spec)
                a = classify_eh(N, ell)
                rows.append({"spec": spec.label(), "analytic": str(a), "quadrature": str(r.tag), "agree": a is r.tag})
        for n in ns:
            for delta in range(delta_max + 1):
                spec = general_spec((delta,) + (0,) * n, ell, kappa)
                r = l2_integral_general(spec)
                a = classify_general(delta, ell, n)
                rows.append({"spec": spec.label(), "analytic": str(a), "quadrature": str(r.tag), "agree": a is r.tag})
    return rows


def results_csv(results) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["spec", "tag", "value", "error_estimate"])
    for r in results:
        rec = r.record()
        w.writerow([rec["spec"], rec["tag"], repr(rec["value"]), repr(rec["error_estimate"])])
    return buf.getvalue()


def results_json(results) -> str:
    def clean(x):
        return x if not isinstance(x, float) or math.isfinite(x) else str(x)

    return json.dumps([{k: clean(v) for k, v in r.record().items()} for r in results], indent=2)
