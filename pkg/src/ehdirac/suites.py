"""Verification suites: each check evaluates one identity and yields a record.

A record is a plain dict with ``check_id``, ``anchor`` (a short description
of the identity), ``status`` (``pass``/``fail``/``error``), ``max_residual``,
``tolerance`` and ``details``.  Status is ``pass`` iff the residual is below
the tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import calabi, eh, hk_quotient, l2, zero_modes
from .forms import dirac, exterior_derivative, hodge_star_2, pointwise_norm_sq, trace_star_2
from .sampling import random_points, random_special_unitary, random_unitary

__all__ = ["SUITES", "DEFAULT_TOLERANCES", "SuiteContext", "run_suite", "make_record"]

DEFAULT_TOLERANCES = {
    "eh.det": 1e-10,
    "eh.inverse": 1e-10,
    "eh.kahler_closed": 1e-8,
    "eh.l2_form_closed": 1e-8,
    "eh.kahler_self_dual": 1e-8,
    "eh.l2_form_anti_self_dual": 1e-8,
    "eh.star_frame_vs_trace": 1e-10,
    "eh.theta3_identity": 1e-9,
    "eh.l2_form_norm": 1e-10,
    "eh.asinh_potential": 1e-7,
    "eh.bundle_round_trip": 1e-12,
    "eh.biaxial_pullback": 1e-8,
    "calabi.det": 1e-10,
    "calabi.inverse": 1e-10,
    "calabi.trace_identities": 1e-10,
    "calabi.killing_identity": 1e-9,
    "calabi.beta_zero_mode": 1e-9,
    "calabi.beta_norm": 1e-10,
    "calabi.l2_form_components": 1e-10,
    "calabi.l2_form_norm": 1e-10,
    "calabi.matches_eh": 1e-12,
    "dirac.zero_modes": 1e-8,
    "dirac.norm_formula": 1e-10,
    "dirac.count": 0.5,
    "dirac.su2_multiplets": 1e-10,
    "quotient.moment_maps": 1e-12,
    "quotient.quaternion_packaging": 1e-12,
    "quotient.completed_square": 1e-6,
    "quotient.connection": 1e-10,
    "quotient.su2_equivariance": 1e-12,
    "l2.classification": 0.5,
    "l2.slopes": 0.5,
    "l2.omega_tilde_finite": 1e-6,
    "l2.beta_log_divergent": 0.5,
    "l2.measure": 5e-3,
    "flux.restriction": 1e-6,
    "flux.engine_disk": 1e-8,
    "flux.engine_limit": 1e-6,
    "flux.gauge": 1e-8,
    "flux.paper_sign": 1e-6,
}


@dataclass
class SuiteContext:
    n: int = 1
    kappa: float = 1.0
    ell_max: int = 3
    seed: int = 0
    samples: int = 100
    tolerances: dict = field(default_factory=dict)

    def tol(self, check_id: str) -> float:
        return float(self.tolerances.get(check_id, DEFAULT_TOLERANCES[check_id]))

    def rng(self, salt: str) -> np.random.Generator:
        # independent stream per suite so parallel runs stay reproducible
        return np.random.default_rng([self.seed, sum(map(ord, salt))])


def make_record(check_id: str, anchor: str, residual: float, tol: float, details=None) -> dict:
    residual = float(residual)
    ok = math.isfinite(residual) and residual < tol
    return {
        "check_id": check_id,
        "anchor": anchor,
        "status": "pass" if ok else "fail",
        "max_residual": residual,
        "tolerance": tol,
        "details": details or {},
    }


def _guarded(ctx: SuiteContext, check_id: str, anchor: str, fn: Callable[[], tuple]) -> dict:
    try:
        out = fn()
    except Exception as exc:  # numeric failures become records, not crashes
        return {
            "check_id": check_id,
            "anchor": anchor,
            "status": "error",
            "max_residual": float("nan"),
            "tolerance": ctx.tol(check_id),
            "details": {"error": f"{type(exc).__name__}: {exc}"},
        }
    residual, details = out if isinstance(out, tuple) else (out, None)
    return make_record(check_id, anchor, residual, ctx.tol(check_id), details)


def _max(x) -> float:
    return float(np.max(np.abs(x)))


# -- eh -------------------------------------------------------------------------
def suite_eh(ctx: SuiteContext) -> list:
    k = ctx.kappa
    rng = ctx.rng("eh")
    z = random_points(rng, ctx.samples, 2)
    g = eh.eh_metric(k)
    om = eh.kahler_form(k)
    recs = [
        _guarded(ctx, "eh.det", "unit determinant of the EH metric", lambda: _max(np.linalg.det(g.matrix(z)) - 1)),
        _guarded(
            ctx,
            "eh.inverse",
            "closed-form EH inverse metric",
            lambda: _max(g.matrix(z) @ g.inverse_matrix(z) - np.eye(2)),
        ),
        _guarded(ctx, "eh.kahler_closed", "Kähler form is closed", lambda: _max(exterior_derivative(om).max_abs(z))),
        _guarded(
            ctx, "eh.kahler_self_dual", "Kähler form is self-dual", lambda: _max((hodge_star_2(om, g) - om).max_abs(z))
        ),
        _guarded(
            ctx,
            "eh.theta3_identity",
            "2 d theta_3 = omega - kappa omega~",
            lambda: _max(eh.theta3_identity_residual(k, z)),
        ),
    ]
    if k > 0:
        omt = eh.l2_form(k)
        s = np.sum(np.abs(z) ** 2, axis=1)
        sF = s * eh.F_of_s(s, k)
        recs += [
            _guarded(
                ctx, "eh.l2_form_closed", "L2 harmonic form is closed", lambda: _max(exterior_derivative(omt).max_abs(z))
            ),
            _guarded(
                ctx,
                "eh.l2_form_anti_self_dual",
                "L2 harmonic form is anti-self-dual",
                lambda: _max((hodge_star_2(omt, g) + omt).max_abs(z)),
            ),
            _guarded(
                ctx,
                "eh.star_frame_vs_trace",
                "frame Hodge star equals trace formula",
                lambda: _max((hodge_star_2(omt, g) - trace_star_2(omt, g)).max_abs(z)),
            ),
            _guarded(
                ctx,
                "eh.l2_form_norm",
                "|omega~|^2 (sF)^4 = 1",
                lambda: _max(pointwise_norm_sq(omt, g).evaluate(z) * sF**4 - 1),
            ),
            _guarded(ctx, "eh.asinh_potential", "A = -(1/2) dbar arcsinh(sqrt(kappa)/s)", lambda: _asinh_residual(k, z[:20])),
        ]
    recs.append(_guarded(ctx, "eh.bundle_round_trip", "symmetric to bundle chart round trip", lambda: _bundle_round_trip(z)))
    recs.append(_guarded(ctx, "eh.biaxial_pullback", "bi-axial form of the metric", lambda: _biaxial(k, ctx.rng("biaxial"))))
    return recs


def _asinh_residual(kappa, z):
    u = eh.asinh_potential(kappa)
    A = eh.connection_potential(kappa)
    worst = 0.0
    for mu in range(2):
        h = 1e-5 * np.maximum(1.0, np.abs(z[:, mu]))
        ex = np.zeros_like(z)
        ex[:, mu] = h
        dx = (u(z + ex) - u(z - ex)) / (2 * h)
        dy = (u(z + 1j * ex) - u(z - 1j * ex)) / (2 * h)
        dbar = 0.5 * (dx + 1j * dy)
        worst = max(worst, _max(A.coefficient((), (mu,)).evaluate(z) + 0.5 * dbar))
    return worst


def _bundle_round_trip(z):
    worst = 0.0
    for p in z:
        if abs(p[1]) < 1e-6:
            continue
        try:
            back = eh.from_bundle(eh.to_bundle(p))
        except eh.BranchCutError:
            continue
        worst = max(worst, float(np.max(np.abs(back - p))) / max(1.0, float(np.max(np.abs(p)))))
    return worst


def _biaxial(kappa, rng, pairs: int = 20):
    worst, done = 0.0, 0
    while done < pairs:
        r = max(kappa, 1e-3) ** 0.25 * rng.uniform(1.2, 3.0)
        p = eh.BiaxialPoint(float(r), rng.uniform(0.3, 2.8), rng.uniform(0, 2 * np.pi), rng.uniform(0, 2 * np.pi))
        try:
            res = eh.biaxial_pullback_residual(p, kappa, rng.normal(size=4), rng.normal(size=4))
        except eh.BranchCutError:
            continue
        worst = max(worst, res)
        done += 1
    return worst, {"pairs": pairs}


# -- calabi -------------------------------------------------------------------------
def suite_calabi(ctx: SuiteContext) -> list:
    n, k = ctx.n, ctx.kappa
    rng = ctx.rng("calabi")
    z = random_points(rng, ctx.samples, n + 1)
    s = np.sum(np.abs(z) ** 2, axis=1)
    g = calabi.calabi_metric(n, k)
    beta = calabi.beta_mode(n, k)

    def beta_residual():
        D = dirac(beta, g)
        return _max(np.sqrt(np.abs(pointwise_norm_sq(D, g).evaluate(z))) / np.sqrt(pointwise_norm_sq(beta, g).evaluate(z)))

    def trace():
        r = calabi.trace_identity_residuals(n, k, z)
        return max(_max(r["trace"]), _max(r["radial"]))

    recs = [
        _guarded(ctx, "calabi.det", "unit determinant of the Calabi metric", lambda: _max(np.linalg.det(g.matrix(z)) - 1)),
        _guarded(
            ctx, "calabi.inverse", "closed-form Calabi inverse metric", lambda: _max(g.matrix(z) @ g.inverse_matrix(z) - np.eye(n + 1))
        ),
        _guarded(ctx, "calabi.trace_identities", "trace identities of the inverse metric", trace),
        _guarded(ctx, "calabi.beta_zero_mode", "untwisted zero mode beta", beta_residual),
        _guarded(
            ctx,
            "calabi.beta_norm",
            "|beta|^2 = 1/(s^{2n+1} F^n)",
            lambda: _max(pointwise_norm_sq(beta, g).evaluate(z) / calabi.beta_norm_sq_closed(s, n, k) - 1),
        ),
    ]
    if k > 0:
        recs += [
            _guarded(
                ctx,
                "calabi.killing_identity",
                "omega - kappa omega~ = 2i d(z.dzbar/F^n)",
                lambda: calabi.killing_identity(n, k, z)["max_residual"],
            ),
            _guarded(ctx, "calabi.l2_form_components", "components of omega~", lambda: _components(n, k, z)),
            _guarded(
                ctx,
                "calabi.l2_form_norm",
                "|omega~|^2 = n(n+1)/(2(s^{n+1}+kappa)^2)",
                lambda: _max(
                    pointwise_norm_sq(calabi.l2_form_general(n, k), g).evaluate(z) / calabi.l2_form_norm_sq_closed(s, n, k) - 1
                ),
            ),
        ]
    if n == 1:
        recs.append(
            _guarded(
                ctx,
                "calabi.matches_eh",
                "n = 1 Calabi metric is Eguchi-Hanson",
                lambda: _max(g.matrix(z) - eh.eh_metric(k).matrix(z)),
            )
        )
    return recs


def _components(n, k, z):
    form = calabi.l2_form_general(n, k)
    closed = calabi.l2_form_components(n, k, z)
    worst = 0.0
    for m in range(n + 1):
        for q in range(n + 1):
            worst = max(worst, _max(form.coefficient((m,), (q,)).evaluate(z) - closed[:, m, q]))
    return worst


# -- dirac -------------------------------------------------------------------------
def eh_mode_specs(ell_max: int, kappa: float) -> list:
    specs = []
    for ell in range(ell_max + 1):
        for two_n in range(ell + 2):
            N = Fraction(two_n, 2)
            specs += [zero_modes.eh_spec(N, m, ell, kappa) for m in zero_modes.admissible_m(N)]
    return specs


def general_mode_specs(n: int, ell_max: int, kappa: float, delta_max: int = 2) -> list:
    from itertools import product

    specs = []
    for ell in range(ell_max + 1):
        for exps in product(range(delta_max + 1), repeat=n + 1):
            if sum(exps) <= delta_max:
                specs.append(zero_modes.general_spec(exps, ell, kappa))
    return specs


def suite_dirac(ctx: SuiteContext) -> list:
    n, k = ctx.n, ctx.kappa
    rng = ctx.rng("dirac")
    z = random_points(rng, min(ctx.samples, 40), n + 1)
    specs = eh_mode_specs(ctx.ell_max, k) if n == 1 else general_mode_specs(n, min(ctx.ell_max, 2), k)

    def table():
        rows = zero_modes.mode_table_rows(specs, z, with_l2=False)
        return max(r[6] for r in rows), {
            "columns": ["n", "delta_or_N", "m", "ell", "kappa", "class", "residual_max"],
            "rows": [list(r[:7]) for r in rows],
        }

    recs = [_guarded(ctx, "dirac.zero_modes", "twisted Dirac zero modes", table)]
    if n == 1:

        def norm_formula():
            worst = 0.0
            for spec in specs:
                sigma, _c, g = zero_modes.mode_setup(spec)
                eng = pointwise_norm_sq(sigma, g).evaluate(z)
                worst = max(worst, _max(eng / zero_modes.eh_norm_sq(spec, z) - 1))
            return worst

        def count():
            got = {ell: zero_modes.count_eh(ell) for ell in range(1, max(ctx.ell_max, 1) + 1)}
            tab = {ell: sum(1 for sp in specs if sp.ell == ell and zero_modes.classify_eh(sp.N, ell).value == "Normalisable") for ell in got}
            bad = sum(got[e] != e * (e + 1) // 2 for e in got) + sum(tab[e] != e * (e + 1) // 2 for e in tab if e <= ctx.ell_max)
            return bad, {"count_eh": got, "normalisable_rows": tab}

        def su2():
            U = random_special_unitary(rng, 2)
            return max(zero_modes.su2_equivariance_residual(Fraction(t, 2), ctx.ell_max, k, U, z) for t in range(4))

        recs += [
            _guarded(ctx, "dirac.norm_formula", "closed-form |sigma|^2", norm_formula),
            _guarded(ctx, "dirac.count", "l(l+1)/2 normalisable modes", count),
            _guarded(ctx, "dirac.su2_multiplets", "SU(2) multiplet structure", su2),
        ]
    return recs


# -- quotient ---------------------------------------------------------------------
def suite_quotient(ctx: SuiteContext) -> list:
    k = ctx.kappa
    rng = ctx.rng("quotient")
    z = random_points(rng, ctx.samples, 2)
    psi = rng.uniform(0, 2 * np.pi, size=len(z))
    coords = [hk_quotient.LevelSetCoords(tuple(p), float(a), k) for p, a in zip(z, psi)]

    def moments():
        return max(max(abs(x) for x in hk_quotient.moment_maps(hk_quotient.embed(c), k)) for c in coords)

    def packaging():
        worst = 0.0
        for c in coords:
            p = hk_quotient.embed(c)
            p = hk_quotient.AmbientPoint(np.array(p.Z) * 1.3, np.array(p.W) * 0.7)  # off the level set too
            a, b = hk_quotient.moment_maps(p, k), hk_quotient.moment_maps_from_quaternion(p, k)
            worst = max(worst, abs(a[0] - b[0]), abs(a[1] - b[1]))
        return worst

    def square(tangents_per_point: int = 2):
        worst, count = 0.0, 0
        for c in coords:
            t = [(complex(*rng.normal(size=2)), complex(*rng.normal(size=2)), rng.normal()) for _ in range(tangents_per_point)]
            worst = max(worst, hk_quotient.pullback_check(c, t, "fd")["max_error"])
            count += len(t)
        return worst, {"tangent_evaluations": count}

    def connection():
        A = eh.connection_potential(k)
        worst = 0.0
        for c in coords:
            zz = np.array(c.z)[None, :]
            ref = np.array([A.coefficient((), (m,)).evaluate(zz)[0] for m in range(2)])
            worst = max(worst, _max(hk_quotient.extract_connection(c, "analytic") - ref))
        return worst

    def su2():
        worst = 0.0
        for c in coords[:20]:
            r = hk_quotient.u2_equivariance(random_special_unitary(rng, 2), c)
            r2 = hk_quotient.u2_equivariance(random_unitary(rng, 2), c)
            worst = max(worst, r["difference"], r["moment_change"], r2["difference_after_det_phase"], r2["moment_change"])
        return worst

    return [
        _guarded(ctx, "quotient.moment_maps", "level set of the moment maps", moments),
        _guarded(ctx, "quotient.quaternion_packaging", "quaternionic moment map", packaging),
        _guarded(ctx, "quotient.completed_square", "completed-square form of the pulled-back metric", square),
        _guarded(ctx, "quotient.connection", "connection read off the quotient", connection),
        _guarded(ctx, "quotient.su2_equivariance", "U(2) equivariance of the embedding", su2),
    ]


# -- l2 -----------------------------------------------------------------------------
def suite_l2(ctx: SuiteContext) -> list:
    k = ctx.kappa if ctx.kappa > 0 else 1.0
    ns = tuple(sorted({2, 3} | ({ctx.n} if ctx.n > 1 else set())))

    def classification():
        rows = l2.classification_sweep(kappa=k, ell_max=max(ctx.ell_max, 5), ns=ns)
        bad = [r for r in rows if not r["agree"]]
        return len(bad), {"specs": len(rows), "disagreements": bad}

    def slopes():
        specs = eh_mode_specs(min(ctx.ell_max, 3), k) + general_mode_specs(2, 2, k, 2)
        bad = []
        for sp in specs:
            f = l2.eh_integrand(sp) if sp.n == 1 else l2.general_integrand(sp)
            if not f.check_slopes():
                bad.append(sp.label())
        return len(bad), {"checked": len(specs), "mismatched": bad}

    def omega_tilde():
        worst, vals = 0.0, {}
        for n in sorted({1, 2, 3, ctx.n}):
            r = l2.l2_norm_form("omega_tilde", n, k)
            exact = math.pi ** (n + 1) * n / (2 * math.factorial(n) * k)
            vals[n] = r.value
            worst = max(worst, abs(r.value / exact - 1) if r.finite else math.inf)
        return worst, {"values": vals}

    def beta():
        tags = {n: str(l2.l2_norm_form("beta", n, k).tag) for n in sorted({1, 2, 3, ctx.n})}
        return sum(t != "LogDivergent" for t in tags.values()), {"tags": tags}

    def measure():
        r = l2.measure_check(k, 2.0, 1_000_000, ctx.rng("measure"))
        return r["relative_error"], r

    return [
        _guarded(ctx, "l2.classification", "normalisability condition", classification),
        _guarded(ctx, "l2.slopes", "declared asymptotic exponents", slopes),
        _guarded(ctx, "l2.omega_tilde_finite", "omega~ has finite L2 norm", omega_tilde),
        _guarded(ctx, "l2.beta_log_divergent", "beta is log divergent", beta),
        _guarded(ctx, "l2.measure", "unit determinant makes the measure flat", measure),
    ]


# -- flux ---------------------------------------------------------------------------
def suite_flux(ctx: SuiteContext) -> list:
    n = ctx.n
    k = ctx.kappa if ctx.kappa > 0 else 1.0
    ells = range(ctx.ell_max + 1)
    eps = 1e-4

    def restriction():
        vals = {ell: l2.flux(l2.FluxTask(n, ell, k)).value for ell in ells}
        return max(abs(v - ell) for ell, v in vals.items()), {"flux": vals}

    def disk():
        vals = {ell: l2.flux_engine(l2.FluxTask(n, ell, k), eps).value for ell in ells}
        res = max(abs(v - l2.disk_flux_closed_form(n, ell, k, eps)) for ell, v in vals.items())
        return res, {"eps": eps, "flux": vals}

    def limit():
        vals = {ell: l2.flux_engine(l2.FluxTask(n, ell, k), eps).value for ell in ells}
        return max(abs(v - ell) for ell, v in vals.items()), {"eps": eps}

    def gauge():
        return max(l2.gauge_shift_flux_change(l2.FluxTask(n, ell, k), eps) for ell in ells)

    def paper_sign():
        vals = {ell: l2.flux(l2.FluxTask(n, ell, k), paper_sign=True).value for ell in ells}
        return max(abs(v + ell) for ell, v in vals.items()), {"flux": vals, "note": "printed restriction sign gives -ell"}

    return [
        _guarded(ctx, "flux.restriction", "flux quantisation from the restriction formula", restriction),
        _guarded(ctx, "flux.engine_disk", "engine flux through the w-disk at small s", disk),
        _guarded(ctx, "flux.engine_limit", "engine flux approaches ell", limit),
        _guarded(ctx, "flux.gauge", "flux is gauge invariant", gauge),
        _guarded(ctx, "flux.paper_sign", "printed restriction sign reverses the flux", paper_sign),
    ]


SUITES = {
    "eh": suite_eh,
    "calabi": suite_calabi,
    "dirac": suite_dirac,
    "quotient": suite_quotient,
    "l2": suite_l2,
    "flux": suite_flux,
}


def run_suite(name: str, ctx: SuiteContext) -> list:
    return [dict(r, suite=name) for r in SUITES[name](ctx)]
