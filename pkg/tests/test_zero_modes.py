"""Twisted Dirac zero modes: residuals, norms, classes and the f_n profile."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
import mpmath

from ehdirac import eh, zero_modes as zm
from ehdirac.fields import power, radius_sq
from ehdirac.forms import pointwise_norm_sq, twisted_dirac
from ehdirac.l2 import unit_log_fn
from ehdirac.sampling import random_points, random_special_unitary

half_integers = st.integers(0, 6).map(lambda k: Fraction(k, 2))


def _fn_antiderivative(t, n, kappa):
    """``-(1/n) x^b 2F1(b, b; 1 + b; -kappa x)`` with ``x = t^{-(n+1)}``, ``b = n/(n+1)``.

    Evaluated in extended precision: double-precision 2F1 loses digits for
    the large negative arguments reached at small ``t``.
    """
    b = mpmath.mpf(n) / (n + 1)
    x = mpmath.mpf(t) ** (-(n + 1))
    return -(x**b) * mpmath.hyp2f1(b, b, 1 + b, -kappa * x) / n


def log_fn_oracle(s, n, ell, kappa):
    with mpmath.workdps(30):
        pref = ell * mpmath.mpf(kappa) ** (mpmath.mpf(n) / (n + 1)) / 2
        return float(pref * (_fn_antiderivative(s, n, kappa) - _fn_antiderivative(1.0, n, kappa)))


# ---------------------------------------------------------------------------
# Specs
# ---------------------------------------------------------------------------


class TestSpec:
    def test_eh_spec_exponents(self):
        spec = zm.eh_spec(Fraction(3, 2), Fraction(1, 2), 2, 1.0)
        assert spec.exponents == (1, 2)
        assert spec.delta == 3
        assert "N=3/2" in spec.label()

    @pytest.mark.parametrize("N,m", [(Fraction(1, 2), Fraction(3, 2)), (Fraction(1), Fraction(1, 2)), (Fraction(1, 3), 0)])
    def test_invalid_labels(self, N, m):
        with pytest.raises(ValueError):
            zm.eh_spec(N, m, 1, 1.0)

    def test_negative_ell_not_implemented(self):
        with pytest.raises(NotImplementedError):
            zm.eh_spec(0, 0, -1, 1.0)
        with pytest.raises(NotImplementedError):
            zm.classify_eh(0, -2)
        with pytest.raises(NotImplementedError):
            zm.classify_general(0, -1, 2)

    def test_general_spec(self):
        spec = zm.general_spec((1, 0, 2), 1, 2.0)
        assert spec.n == 2 and spec.delta == 3
        with pytest.raises(ValueError):
            zm.general_spec((1, -1, 0), 1, 2.0)
        with pytest.raises(ValueError):
            zm.ZeroModeSpec(2, 1, 1.0, N=Fraction(0), m=Fraction(0))

    def test_bad_kappa(self):
        with pytest.raises(ValueError):
            zm.eh_spec(0, 0, 1, -1.0)


# ---------------------------------------------------------------------------
# Residuals
# ---------------------------------------------------------------------------


class TestEHModes:
    @pytest.mark.parametrize("kappa", [0.5, 1.0, 4.0])
    @pytest.mark.parametrize("ell", [0, 1, 2, 3])
    def test_residual(self, kappa, ell, rng):
        z = random_points(rng, 15, 2)
        for two_n in range(ell + 2):
            N = Fraction(two_n, 2)
            for m in zm.admissible_m(N):
                r = zm.residual_ratio(zm.eh_spec(N, m, ell, kappa), z)
                assert np.max(r["ratio"]) < 1e-8

    @pytest.mark.parametrize("ell", [1, 2, 3])
    def test_printed_exponent_leaves_residual(self, ell, rng):
        """With ``f^ell`` instead of ``f^{ell/2}`` the scalar equation is not solved."""
        kappa = 1.0
        z = random_points(rng, 10, 2)
        F, f = eh.profiles(kappa)
        sigma = eh.zdzbar(2).scale(power(F, -1) * power(radius_sq(2), -2) * power(f, -ell, real_base=True))
        g = eh.eh_metric(kappa)
        D = twisted_dirac(sigma, eh.connection(ell, kappa), g)
        ratio = np.sqrt(np.abs(pointwise_norm_sq(D, g)(z)) / pointwise_norm_sq(sigma, g)(z))
        assert np.min(ratio) > 1e-3

    @pytest.mark.parametrize("kappa", [0.5, 1.0, 4.0])
    def test_norm_formula(self, kappa, rng):
        z = random_points(rng, 20, 2)
        for ell in range(4):
            for two_n in range(ell + 2):
                N = Fraction(two_n, 2)
                for m in zm.admissible_m(N):
                    spec = zm.eh_spec(N, m, ell, kappa)
                    sigma, _conn, g = zm.mode_setup(spec)
                    eng = pointwise_norm_sq(sigma, g)(z)
                    assert np.allclose(eng, zm.eh_norm_sq(spec, z), rtol=1e-10, atol=0)

    def test_spot_value(self):
        """``(N, m, ell, kappa) = (0, 0, 1, 3)`` at ``z = (1, 0)``: ``s = 1``, ``F = 2``, ``f = 2 + sqrt 3``."""
        spec = zm.eh_spec(0, 0, 1, 3.0)
        z = np.array([[1.0, 0.0]])
        expected = 1 / (2 * (2 + np.sqrt(3)))
        sigma, _c, g = zm.mode_setup(spec)
        assert zm.eh_norm_sq(spec, z)[0] == pytest.approx(expected, abs=1e-12)
        assert pointwise_norm_sq(sigma, g)(z)[0] == pytest.approx(expected, abs=1e-12)
        # the squared denominator is not what either computation gives
        assert abs(expected - 1 / (2 * (2 + np.sqrt(3)) ** 2)) > 0.05

    def test_su2_multiplets(self, rng):
        z = random_points(rng, 12, 2)
        U = random_special_unitary(rng, 2)
        for two_n in range(4):
            assert zm.su2_equivariance_residual(Fraction(two_n, 2), 2, 1.0, U, z) < 1e-10

    def test_flat_untwisted(self, rng):
        z = random_points(rng, 10, 2)
        r = zm.residual_ratio(zm.eh_spec(Fraction(1, 2), Fraction(1, 2), 0, 0.0), z)
        assert np.max(r["ratio"]) < 1e-10


class TestGeneralModes:
    @pytest.mark.parametrize("n", [2, 3])
    @pytest.mark.parametrize("kappa", [0.5, 1.0, 4.0])
    def test_residual(self, n, kappa, rng):
        from itertools import product

        z = random_points(rng, 10, n + 1)
        for ell in range(3):
            for exps in product(range(3), repeat=n + 1):
                if sum(exps) > 2:
                    continue
                r = zm.residual_ratio(zm.general_spec(exps, ell, kappa), z)
                assert np.max(r["ratio"]) < 1e-8

    @pytest.mark.parametrize("n", [2, 3])
    def test_ode_residual(self, n, rng):
        z = random_points(rng, 10, n + 1)
        spec = zm.general_spec((1,) + (0,) * n, 2, 1.5)
        h = zm.general_h(spec)
        res = zm.ode_residual(n, h, spec.delta, spec.ell, spec.kappa)(z)
        assert np.max(np.abs(res) / np.abs(h(z))) < 1e-8

    def test_n1_general_matches_eh(self, rng):
        """The general ansatz at ``n = 1`` gives the EH mode up to the constant ``f(1)^{ell/2}``."""
        z = random_points(rng, 10, 2)
        kappa, ell = 2.0, 3
        a = zm.general_zero_mode(zm.general_spec((1, 0), ell, kappa))
        b = zm.eh_zero_mode(zm.eh_spec(Fraction(1, 2), Fraction(-1, 2), ell, kappa))
        ratio = a.coefficient((), (0,))(z) / b.coefficient((), (0,))(z)
        assert np.allclose(ratio, eh.f_of_s(1.0, kappa) ** (ell / 2), rtol=1e-10)


# ---------------------------------------------------------------------------
# f_n profile
# ---------------------------------------------------------------------------


class TestFn:
    @given(s=st.floats(1e-3, 1e3), n=st.integers(1, 4), ell=st.integers(1, 4), kappa=st.floats(0.2, 8.0))
    def test_hypergeometric_oracle(self, s, n, ell, kappa):
        assert zm.log_fn(s, n, ell, kappa) == pytest.approx(log_fn_oracle(s, n, ell, kappa), rel=1e-9, abs=1e-11)

    @given(s=st.floats(1e-6, 1e5), n=st.integers(1, 3), kappa=st.sampled_from([0.5, 1.0, 4.0]))
    def test_dense_ode_matches_quadrature(self, s, n, kappa):
        assert unit_log_fn(s, n, kappa) == pytest.approx(float(zm.log_fn(s, n, 1, kappa)), rel=1e-9, abs=1e-10)

    @given(s=st.floats(1e-3, 1e3), ell=st.integers(1, 4), kappa=st.floats(0.2, 8.0))
    def test_n1_relation(self, s, ell, kappa):
        """``f_1 = (f / f(1))^{-ell/2}``."""
        expected = -ell / 2 * (np.log(eh.f_of_s(s, kappa)) - np.log(eh.f_of_s(1.0, kappa)))
        assert zm.log_fn(s, 1, ell, kappa) == pytest.approx(float(expected), rel=1e-9, abs=1e-11)

    def test_anchored_and_trivial_cases(self):
        assert zm.log_fn(1.0, 2, 3, 1.0) == 0.0
        assert zm.log_fn(5.0, 2, 0, 1.0) == 0.0
        assert zm.fn_profile(2, 0, 1.0)(np.ones((1, 3))) == 1

    def test_small_s_slope(self):
        """``f_n ~ s^{ell/2}`` as ``s -> 0``."""
        a, b = 1e-6, 1e-5
        slope = (zm.log_fn(b, 2, 2, 1.0) - zm.log_fn(a, 2, 2, 1.0)) / np.log(b / a)
        assert slope == pytest.approx(1.0, rel=1e-3)


# ---------------------------------------------------------------------------
# Classification and counting
# ---------------------------------------------------------------------------


class TestClassification:
    @pytest.mark.parametrize("ell", range(1, 6))
    def test_count(self, ell):
        assert zm.count_eh(ell) == ell * (ell + 1) // 2

    def test_count_zero(self):
        assert zm.count_eh(0) == 0

    @given(N=half_integers, ell=st.integers(0, 8))
    def test_eh_classes(self, N, ell):
        cls = zm.classify_eh(N, ell)
        if 2 * N < ell:
            assert cls is zm.NormClass.NORMALISABLE
        elif 2 * N == ell:
            assert cls is zm.NormClass.LOG_DIVERGENT
        else:
            assert cls is zm.NormClass.POWER_DIVERGENT_AT_ZERO

    @given(delta=st.integers(0, 6), ell=st.integers(0, 6), n=st.integers(2, 4))
    def test_general_classes(self, delta, ell, n):
        cls = zm.classify_general(delta, ell, n)
        assert (cls is zm.NormClass.NORMALISABLE) == (ell > delta)
        assert (cls is zm.NormClass.LOG_DIVERGENT) == (ell == delta)

    @given(N=half_integers)
    def test_multiplets(self, N):
        ms = zm.admissible_m(N)
        assert len(ms) == zm.multiplet_dim(N) == int(2 * N) + 1
        assert ms[0] == -N and ms[-1] == N

    def test_str(self):
        assert str(zm.NormClass.LOG_DIVERGENT) == "LogDivergent"


def test_mode_table_csv(rng):
    z = random_points(rng, 5, 2)
    specs = [zm.eh_spec(0, 0, 1, 1.0), zm.eh_spec(1, 0, 1, 1.0)]
    rows = zm.mode_table_rows(specs, z)
    assert rows[0][5] == "Normalisable" and np.isfinite(rows[0][7])
    assert rows[1][5] == "PowerDivergentAtZero" and np.isnan(rows[1][7])
    text = zm.mode_table_csv(rows)
    assert text.splitlines()[0].startswith("n,delta_or_N,m,ell")
