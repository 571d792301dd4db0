"""Calabi metrics on C^{n+1}: identities, the L2 form and the beta mode."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ehdirac import calabi, eh
from ehdirac.forms import dirac, pointwise_norm_sq
from ehdirac.sampling import random_points, random_tangents, random_unitary

NS = [1, 2, 3]


class TestParams:
    @pytest.mark.parametrize("n", [0, 9, 1.5])
    def test_bad_n(self, n):
        with pytest.raises(ValueError):
            calabi.CalabiParams(n, 1.0)

    def test_bad_kappa(self):
        with pytest.raises(ValueError):
            calabi.calabi_metric(2, -0.1)

    def test_flat(self, rng):
        z = random_points(rng, 5, 3)
        assert np.allclose(calabi.calabi_metric(2, 0.0).matrix(z), np.eye(3))


class TestMetric:
    @pytest.mark.parametrize("n", [2, 3])
    @pytest.mark.parametrize("kappa", [0.5, 1.0, 4.0])
    def test_det_and_inverse(self, n, kappa, rng):
        z = random_points(rng, 100, n + 1)
        g = calabi.calabi_metric(n, kappa)
        G = g.matrix(z)
        assert np.max(np.abs(np.linalg.det(G) - 1)) < 1e-10
        assert np.max(np.abs(g.inverse_matrix(z) - np.linalg.inv(G))) < 1e-10

    @pytest.mark.parametrize("n", [4, 6, 8])
    def test_inverse_relative_for_large_n(self, n, rng):
        """Inverse entries grow like ``s^{-(n+2)}``, so compare relative to their size.

        The reference inverse is itself limited by the conditioning of ``g``.
        """
        z = random_points(rng, 50, n + 1)
        g = calabi.calabi_metric(n, 1.0)
        ref = np.linalg.inv(g.matrix(z))
        scale = np.max(np.abs(ref), axis=(1, 2))[:, None, None]
        assert np.max(np.abs(g.inverse_matrix(z) - ref) / scale) < 1e-8

    @pytest.mark.parametrize("n", NS)
    def test_trace_identities(self, n, rng):
        z = random_points(rng, 50, n + 1)
        r = calabi.trace_identity_residuals(n, 2.0, z)
        assert np.max(r["trace"]) < 1e-10 and np.max(r["radial"]) < 1e-10

    @given(s=st.floats(0.1, 1e3), n=st.integers(1, 4), kappa=st.floats(0.1, 10.0))
    def test_profile_identities(self, s, n, kappa):
        """Both identities cancel terms of size ``F^{n+1}``; the tolerance scales with it."""
        r = calabi.profile_identity_residuals(n, kappa, s)
        tol = 1e-13 * max(1.0, float(calabi.general_F_of_s(s, n, kappa)) ** (n + 1))
        assert r["det"] < tol and r["killing"] < tol

    @pytest.mark.parametrize("kappa", [0.5, 1.0, 4.0])
    def test_n1_is_eguchi_hanson(self, kappa, rng):
        z = random_points(rng, 50, 2)
        assert np.max(np.abs(calabi.calabi_metric(1, kappa).matrix(z) - eh.eh_metric(kappa).matrix(z))) < 1e-12

    @pytest.mark.parametrize("n", [2, 3])
    def test_unitary_invariance(self, n, rng):
        z = random_points(rng, 5, n + 1)
        u = random_tangents(rng, 5, n + 1)
        U = random_unitary(rng, n + 1)
        g = calabi.calabi_metric(n, 1.5)
        assert np.allclose(g.real_inner(z, u, u), g.real_inner(z @ U.T, u @ U.T, u @ U.T), rtol=1e-10)

    @given(seed=st.integers(0, 2**16), n=st.integers(1, 4))
    def test_lagrange_identity(self, seed, n):
        r = np.random.default_rng(seed)
        z = random_points(r, 3, n + 1)
        v = random_tangents(r, 3, n + 1)
        assert np.max(np.abs(calabi.identity_cn_residual(z, v))) < 1e-12


class TestForms:
    @pytest.mark.parametrize("n", NS)
    def test_killing_identity(self, n, rng):
        z = random_points(rng, 20, n + 1)
        assert calabi.killing_identity(n, 1.7, z)["max_residual"] < 1e-9

    @pytest.mark.parametrize("n", NS)
    def test_components(self, n, rng):
        z = random_points(rng, 20, n + 1)
        form = calabi.l2_form_general(n, 2.0)
        closed = calabi.l2_form_components(n, 2.0, z)
        for a in range(n + 1):
            for b in range(n + 1):
                assert np.allclose(form.coefficient((a,), (b,))(z), closed[:, a, b], rtol=1e-10, atol=1e-12)

    @pytest.mark.parametrize("n", NS)
    def test_displayed_radial_entry_on_axis(self, n):
        s = np.array([0.3, 1.0, 5.0])
        z = np.zeros((3, n + 1), dtype=complex)
        z[:, 0] = np.sqrt(s)
        closed = calabi.l2_form_components(n, 1.0, z)
        assert np.allclose(closed[:, 0, 0], calabi.radial_l2_component(s, n, 1.0))

    @pytest.mark.parametrize("n", [2, 3])
    def test_displayed_off_diagonal_is_off_by_power_of_F(self, n):
        """The displayed off-diagonal entry carries an extra ``F^{-(n+1)}``."""
        kappa = 1.0
        z = np.array([[0.6 + 0.2j, -0.3 + 0.5j] + [0.4] * (n - 1)])
        s = float(np.sum(np.abs(z) ** 2))
        F = float(calabi.general_F_of_s(s, n, kappa))
        closed = calabi.l2_form_components(n, kappa, z)[0, 0, 1]
        displayed = -2j * (1 + n / F ** (n + 1)) * np.conj(z[0, 0]) * z[0, 1] / (s ** (n + 2) * F ** (2 * n + 1))
        assert not np.isclose(closed, displayed, rtol=1e-3)
        assert np.isclose(displayed * F ** (n + 1), closed, rtol=1e-12)

    @pytest.mark.parametrize("n", NS)
    def test_l2_form_norm(self, n, rng):
        z = random_points(rng, 20, n + 1, s_range=(0.5, 5.0))
        s = np.sum(np.abs(z) ** 2, axis=1)
        val = pointwise_norm_sq(calabi.l2_form_general(n, 1.0), calabi.calabi_metric(n, 1.0))(z)
        assert np.allclose(val, calabi.l2_form_norm_sq_closed(s, n, 1.0), rtol=1e-10)

    def test_connection_general_matches_eh(self):
        z = np.array([[0.5 + 0.5j, 1.0 - 0.2j]])
        a = calabi.connection_general(1, 2, 3.0)
        b = eh.connection(2, 3.0)
        assert np.max((a - b).max_abs(z)) < 1e-12


class TestBetaMode:
    @pytest.mark.parametrize("n", NS)
    def test_zero_mode(self, n, rng):
        z = random_points(rng, 30, n + 1)
        g = calabi.calabi_metric(n, 1.0)
        beta = calabi.beta_mode(n, 1.0)
        D = dirac(beta, g)
        ratio = np.sqrt(np.abs(pointwise_norm_sq(D, g)(z)) / pointwise_norm_sq(beta, g)(z))
        assert np.max(ratio) < 1e-9

    @pytest.mark.parametrize("n", NS)
    def test_norm(self, n, rng):
        z = random_points(rng, 30, n + 1)
        s = np.sum(np.abs(z) ** 2, axis=1)
        val = pointwise_norm_sq(calabi.beta_mode(n, 2.0), calabi.calabi_metric(n, 2.0))(z)
        assert np.allclose(val, calabi.beta_norm_sq_closed(s, n, 2.0), rtol=1e-10)


def test_profile_csv():
    lines = calabi.profile_csv_general(2, 1.0, [0.5, 2.0]).strip().splitlines()
    assert lines[0] == "s,F,omega_tilde_norm_sq,beta_norm_sq"
    assert len(lines) == 3
