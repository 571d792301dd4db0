"""Form algebra, exterior derivative, metric contraction and the Dirac operator."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ehdirac import eh
from ehdirac.fields import coord, coordbar, radius_sq
from ehdirac.forms import (
    ContractionError,
    FormField,
    basis_form,
    clifford_mul,
    dirac,
    dz,
    dzbar,
    exterior_derivative,
    hodge_star_2,
    metric_contract,
    pointwise_norm_sq,
    scalar_form,
    twisted_dirac,
    wedge,
)
from ehdirac.metric import ChartDimensionError, HermitianMetricField, flat_metric
from oracles import d_minus_hermitian, d_minus_star, d_plus, kahler_cancellation
from strategies import chart_points, random_field, scalar_fields

Z0 = np.array([[0.7 + 0.2j, -0.4 + 0.9j]])


def _close(a: FormField, b: FormField, z, tol=1e-10):
    return float(np.max((a - b).max_abs(z))) < tol


# ---------------------------------------------------------------------------
# Algebra
# ---------------------------------------------------------------------------


class TestAlgebra:
    def test_index_sorting_sign(self):
        f = FormField(2, {((), (1, 0)): 1.0})
        assert list(f.coeffs) == [((), (0, 1))]
        assert f.coefficient((), (0, 1))(Z0)[0] == -1
        assert f.coefficient((), (1, 0))(Z0)[0] == 1

    def test_repeated_index_vanishes(self):
        assert FormField(2, {((), (0, 0)): 1.0}).is_zero

    def test_wedge_antisymmetry(self):
        a, b = dzbar(2, 0), dz(2, 1)
        assert _close(wedge(a, b), -wedge(b, a), Z0)
        assert wedge(a, a).is_zero

    def test_wedge_moves_dz_past_dzbar(self):
        """``dzbar_1 ^ dz_2 = -dz_2 ^ dzbar_1``."""
        w = wedge(dzbar(2, 0), dz(2, 1))
        assert w.coefficient((1,), (0,))(Z0)[0] == -1

    @given(a=scalar_fields(), b=scalar_fields(), z=chart_points())
    def test_wedge_associative(self, a, b, z):
        z = z[None, :]
        x = scalar_form(2, a) * dz(2, 0)
        y = scalar_form(2, b) * dzbar(2, 1)
        w = dzbar(2, 0)
        assert _close(wedge(wedge(x, y), w), wedge(x, wedge(y, w)), z, 1e-9)

    def test_degrees_and_parts(self):
        f = dz(2, 0) + dzbar(2, 1) * dzbar(2, 0)
        assert f.degrees == {(1, 0), (0, 2)}
        with pytest.raises(ValueError):
            f.degree
        assert f.part(0, 2).degree == (0, 2)
        assert not f.is_spinor
        assert f.part(0, 2).is_spinor

    def test_conj_of_mixed_form(self):
        """``conj(dz_1 ^ dzbar_2) = dzbar_1 ^ dz_2 = -dz_2 ^ dzbar_1``."""
        f = basis_form(2, (0,), (1,)).conj()
        assert f.coefficient((1,), (0,))(Z0)[0] == -1

    def test_dimension_mismatch(self):
        with pytest.raises(ChartDimensionError):
            dz(2, 0) + dz(3, 0)
        with pytest.raises(ChartDimensionError):
            dz(2, 2)

    def test_scalar_multiplication(self):
        f = 2 * dz(2, 0)
        g = dz(2, 0) * coord(1)
        assert f.coefficient((0,), ())(Z0)[0] == 2
        assert g.coefficient((0,), ())(Z0)[0] == Z0[0, 1]


# ---------------------------------------------------------------------------
# Exterior derivative
# ---------------------------------------------------------------------------


class TestExteriorDerivative:
    @given(f=scalar_fields(), z=chart_points())
    def test_d_squared_on_functions(self, f, z):
        z = z[None, :]
        assert float(np.max(exterior_derivative(exterior_derivative(scalar_form(2, f))).max_abs(z))) < 1e-8

    @given(b=scalar_fields(), c=scalar_fields(), z=chart_points())
    def test_d_squared_on_one_forms(self, b, c, z):
        z = z[None, :]
        form = FormField(2, {((), (0,)): b, ((1,), ()): c})
        dd = exterior_derivative(exterior_derivative(form))
        scale = 1.0 + float(np.max(np.abs(b(z)))) + float(np.max(np.abs(c(z))))
        assert float(np.max(dd.max_abs(z))) < 1e-8 * scale

    @given(b=scalar_fields(), c=scalar_fields(), z=chart_points())
    def test_leibniz(self, b, c, z):
        z = z[None, :]
        x = scalar_form(2, b)
        y = scalar_form(2, c) * dzbar(2, 0)
        lhs = exterior_derivative(wedge(x, y))
        rhs = wedge(exterior_derivative(x), y) + wedge(x, exterior_derivative(y))
        assert _close(lhs, rhs, z, 1e-8)

    def test_six_terms_of_d_on_a_one_form(self):
        """Full ``d(beta dzbar_1 + gamma dzbar_2)``; the ``(0,2)`` part is ``dbar_1 gamma - dbar_2 beta``."""
        beta, gamma = coord(0) * coordbar(1) ** 2, coordbar(0) * coord(1)
        d = exterior_derivative(FormField(2, {((), (0,)): beta, ((), (1,)): gamma}))
        z = Z0
        assert np.allclose(d.coefficient((0,), (0,))(z), beta.dz(0)(z))
        assert np.allclose(d.coefficient((1,), (0,))(z), beta.dz(1)(z))
        assert np.allclose(d.coefficient((0,), (1,))(z), gamma.dz(0)(z))
        assert np.allclose(d.coefficient((1,), (1,))(z), gamma.dz(1)(z))
        expected = gamma.dzbar(0)(z) - beta.dzbar(1)(z)
        assert np.allclose(d.coefficient((), (0, 1))(z), expected)
        # the opposite sign ordering is not what the engine produces
        assert not np.allclose(d.coefficient((), (0, 1))(z), gamma.dzbar(1)(z) - beta.dzbar(0)(z))


# ---------------------------------------------------------------------------
# Metric contraction and the Dirac operator
# ---------------------------------------------------------------------------


class TestFlatContraction:
    def test_examples(self):
        g = flat_metric(2)
        assert metric_contract(basis_form(2, (0,), (0,)), g).coefficient((), ())(Z0)[0] == 1
        assert metric_contract(basis_form(2, (0,), (1,)), g).is_zero
        top = metric_contract(basis_form(2, (0,), (0, 1)), g)
        assert top.coefficient((), (1,))(Z0)[0] == 1
        top2 = metric_contract(basis_form(2, (1,), (0, 1)), g)
        assert top2.coefficient((), (0,))(Z0)[0] == -1

    def test_one_zero_form_contracts_to_zero(self):
        assert metric_contract(dz(2, 0), flat_metric(2)).is_zero

    def test_wrong_degree_raises(self):
        with pytest.raises(ContractionError):
            metric_contract(dzbar(2, 0), flat_metric(2))
        with pytest.raises(ContractionError):
            dirac(dz(2, 0), flat_metric(2))

    def test_flat_dirac_of_top_form(self):
        """``D(|z_1|^2 dzbar_1 ^ dzbar_2) = zbar_1 dzbar_2`` on flat C^2."""
        sigma = scalar_form(2, coord(0) * coordbar(0)) * dzbar(2, 0) * dzbar(2, 1)
        out = dirac(sigma, flat_metric(2))
        assert np.allclose(out.coefficient((), (1,))(Z0), np.conj(Z0[:, 0]))
        assert out.coefficient((), (0,)).is_zero

    def test_flat_dirac_squares_to_laplacian(self):
        """On flat space ``D^2 f = sum_mu d_mu dbar_mu f`` with the engine's sign."""
        f = coord(0) ** 2 * coordbar(0) ** 2 + coordbar(1) * coord(1) ** 3
        g = flat_metric(2)
        dd = dirac(dirac(scalar_form(2, f), g), g)
        lap = f.dz(0).dzbar(0) + f.dz(1).dzbar(1)
        assert np.allclose(dd.coefficient((), ())(Z0), lap(Z0))


class TestChiralOracles:
    """The engine against explicit chiral formulas over the EH metric."""

    @pytest.mark.parametrize("kappa", [0.5, 1.0, 4.0])
    def test_d_plus(self, kappa, rng):
        g = eh.eh_metric(kappa)
        z = np.array([[0.8 + 0.3j, -0.5 + 1.1j], [1.5, 0.2 - 0.7j]])
        alpha, delta = random_field(rng), random_field(rng)
        out = dirac(scalar_form(2, alpha) + scalar_form(2, delta) * dzbar(2, 0) * dzbar(2, 1), g)
        c1, c2 = d_plus(alpha, delta, g, z)
        assert np.allclose(out.coefficient((), (0,))(z), c1, rtol=1e-10, atol=1e-10)
        assert np.allclose(out.coefficient((), (1,))(z), c2, rtol=1e-10, atol=1e-10)

    @pytest.mark.parametrize("kappa", [0.5, 1.0, 4.0])
    def test_d_minus_star_and_hermitian_form(self, kappa, rng):
        g = eh.eh_metric(kappa)
        z = np.array([[0.8 + 0.3j, -0.5 + 1.1j], [1.5, 0.2 - 0.7j]])
        beta, gamma = random_field(rng), random_field(rng)
        out = dirac(FormField(2, {((), (0,)): beta, ((), (1,)): gamma}), g)
        s0, s2 = d_minus_star(beta, gamma, g, z)
        h0, h2 = d_minus_hermitian(beta, gamma, g, z)
        assert np.allclose(out.coefficient((), ())(z), s0, rtol=1e-10, atol=1e-10)
        assert np.allclose(out.coefficient((), (0, 1))(z), s2, rtol=1e-10, atol=1e-10)
        assert np.allclose(h0, s0, rtol=1e-8, atol=1e-8)
        assert np.allclose(h2, s2)

    @given(z=chart_points(), kappa=st.sampled_from([0.0, 0.5, 1.0, 4.0]))
    def test_kahler_cancellation(self, z, kappa):
        a, b = kahler_cancellation(eh.eh_metric(kappa), z[None, :])
        assert np.max(np.abs(a)) < 1e-8 and np.max(np.abs(b)) < 1e-8

    def test_non_kahler_metric_breaks_cancellation(self):
        """A conformally rescaled flat metric is Hermitian but not Kähler."""
        w = 1 + radius_sq(2)
        g = HermitianMetricField(2, ((w, 0), (0, w)), ((1 / w, 0), (0, 1 / w)), w * w)
        a, b = kahler_cancellation(g, Z0)
        assert max(abs(a[0]), abs(b[0])) > 1e-3


class TestClifford:
    @given(z=chart_points(), kappa=st.sampled_from([0.5, 1.0, 3.0]), a=st.lists(st.floats(-2, 2), min_size=8, max_size=8))
    def test_anticommutator(self, z, kappa, a):
        """``{u., v.} = <u^{1,0}, v^{0,1}> + <v^{1,0}, u^{0,1}>`` with ``<dz_mu, dzbar_nu> = g_inv[nu][mu]``."""
        z = z[None, :]
        g = eh.eh_metric(kappa)
        u = FormField(2, {((0,), ()): complex(a[0], a[1]), ((), (1,)): complex(a[2], a[3])})
        v = FormField(2, {((1,), ()): complex(a[4], a[5]), ((), (0,)): complex(a[6], a[7])})
        sigma = scalar_form(2, coord(0) + 2) + dzbar(2, 1) * coordbar(0)
        lhs = clifford_mul(u, clifford_mul(v, sigma, g), g) + clifford_mul(v, clifford_mul(u, sigma, g), g)
        Gi = g.inverse_matrix(z)[0]
        pair = complex(a[0], a[1]) * complex(a[6], a[7]) * Gi[0, 0] + complex(a[4], a[5]) * complex(a[2], a[3]) * Gi[1, 1]
        for key in [((), ()), ((), (1,))]:
            expect = pair * sigma.coefficient(*key)(z)
            assert np.allclose(lhs.coefficient(*key)(z), expect, rtol=1e-9, atol=1e-9)

    def test_zero_one_part_wedges(self):
        g = flat_metric(2)
        out = clifford_mul(dzbar(2, 0), scalar_form(2, 1.0), g)
        assert out.coefficient((), (0,))(Z0)[0] == 1

    def test_needs_a_one_form(self):
        with pytest.raises(ContractionError):
            clifford_mul(dzbar(2, 0) * dzbar(2, 1), scalar_form(2, 1.0), flat_metric(2))

    def test_twisted_with_zero_connection_is_dirac(self):
        g = eh.eh_metric(1.0)
        sigma = scalar_form(2, coord(0)) * dzbar(2, 1)
        assert _close(twisted_dirac(sigma, FormField(2), g), dirac(sigma, g), Z0)

    def test_connection_action_on_zero_mode_ansatz(self):
        """``A . (beta dzbar_1 + gamma dzbar_2)`` for the EH twisting connection.

        Hand-expanded: ``ell sqrt(kappa)/(2 F s^2) (z_1 gamma - z_2 beta) dzbar_1 ^ dzbar_2
        - ell sqrt(kappa)/(2 s^2) (zbar_1 beta + zbar_2 gamma)``.
        """
        kappa, ell = 3.0, 2
        g = eh.eh_metric(kappa)
        beta, gamma = coord(0) * coordbar(1), coord(1) ** 2
        sigma = FormField(2, {((), (0,)): beta, ((), (1,)): gamma})
        out = clifford_mul(eh.connection(ell, kappa), sigma, g)
        z = Z0
        s = np.sum(np.abs(z) ** 2, axis=1)
        F = eh.F_of_s(s, kappa)
        b, c = beta(z), gamma(z)
        top = ell * np.sqrt(kappa) / (2 * F * s**2) * (z[:, 0] * c - z[:, 1] * b)
        scal = -ell * np.sqrt(kappa) / (2 * s**2) * (np.conj(z[:, 0]) * b + np.conj(z[:, 1]) * c)
        assert np.allclose(out.coefficient((), (0, 1))(z), top)
        assert np.allclose(out.coefficient((), ())(z), scal)


class TestNormAndStar:
    def test_flat_norms(self):
        g = flat_metric(2)
        assert pointwise_norm_sq(dzbar(2, 0) * dzbar(2, 1), g)(Z0)[0] == pytest.approx(1.0)
        assert pointwise_norm_sq(dzbar(2, 0) + dzbar(2, 1), g)(Z0)[0] == pytest.approx(2.0)
        # mixed components carry the 1/8 weight
        assert pointwise_norm_sq(basis_form(2, (0,), (0,)), g)(Z0)[0] == pytest.approx(0.125)

    def test_norm_is_nonnegative(self, rng):
        g = eh.eh_metric(2.0)
        z = np.array([[0.3 + 0.4j, 1.2 - 0.1j]])
        form = FormField(2, {((), (0,)): random_field(rng), ((), (1,)): random_field(rng)})
        assert pointwise_norm_sq(form, g)(z)[0] >= 0

    def test_flat_star_on_kahler_form(self):
        g = flat_metric(2)
        om = basis_form(2, (0,), (0,)) + basis_form(2, (1,), (1,))
        assert _close(hodge_star_2(om, g), om, Z0)
        asd = basis_form(2, (0,), (0,)) - basis_form(2, (1,), (1,))
        assert _close(hodge_star_2(asd, g), -asd, Z0)

    def test_star_needs_surface_and_two_form(self):
        with pytest.raises(ChartDimensionError):
            hodge_star_2(basis_form(3, (0,), (0,)), flat_metric(3))
        with pytest.raises(ValueError):
            hodge_star_2(dz(2, 0), flat_metric(2))


class TestMetric:
    def test_flat_metric(self):
        g = flat_metric(3)
        assert np.allclose(g.matrix(np.ones((1, 3))), np.eye(3))
        assert g.determinant(np.ones((1, 3)))[0] == 1

    def test_real_inner_convention(self):
        """``|dz|^2`` means ``dx^2 + dy^2``: a unit real vector has unit length."""
        g = flat_metric(2)
        assert g.real_inner(Z0, np.array([[1, 0]]), np.array([[1, 0]]))[0] == pytest.approx(1.0)
        assert g.real_inner(Z0, np.array([[1j, 0]]), np.array([[1, 0]]))[0] == pytest.approx(0.0)

    def test_shape_validation(self):
        with pytest.raises(ChartDimensionError):
            HermitianMetricField(2, ((1, 0),), ((1, 0), (0, 1)), 1)

    def test_missing_frame(self):
        g = HermitianMetricField(1, ((1,),), ((1,),), 1)
        with pytest.raises(ValueError):
            g.frame_matrix(np.ones((1, 1)))
