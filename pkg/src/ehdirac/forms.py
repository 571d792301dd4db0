"""Complex differential forms and the spin-c Dirac operator on a Kähler chart.

Forms are stored as ``{(I, J): coefficient}`` against ``dz_I ^ dzbar_J`` with
strictly increasing index tuples ``I`` and ``J`` (zero-based).  Spinors are
forms with every ``I`` empty, i.e. sections of ``Lambda^{0,*}``.

The Dirac operator ``D = dbar - dbar^*`` is computed without metric
derivatives: take the full exterior derivative, keep the ``(0, q+1)`` part
and contract the ``(1, q)`` part with the inverse metric.
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Mapping

import numpy as np

from .fields import ZERO, PointwiseField, ScalarField, as_field, prod_fields, sum_fields
from .metric import ChartDimensionError, HermitianMetricField

__all__ = [
    "FormField",
    "ContractionError",
    "basis_form",
    "dz",
    "dzbar",
    "scalar_form",
    "wedge",
    "exterior_derivative",
    "metric_contract",
    "dirac",
    "clifford_mul",
    "twisted_dirac",
    "pointwise_norm_sq",
    "hodge_star_2",
    "trace_star_2",
]


class ContractionError(ValueError):
    """Raised when a metric contraction is applied to a form of the wrong degree."""


def _sort_sign(indices):
    """Return ``(sign, sorted_tuple)``; sign 0 when an index repeats."""
    idx = list(indices)
    if len(set(idx)) != len(idx):
        return 0, ()
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    return sign, tuple(idx)


class FormField:
    """A complex differential form with scalar-field coefficients.

    Parameters
    ----------
    dim : int
        Complex dimension of the chart.
    coeffs : mapping
        ``{(I, J): ScalarField}``; index tuples need not be sorted on input,
        they are canonicalised with the appropriate signs.
    """

    __slots__ = ("dim", "coeffs")

    def __init__(self, dim: int, coeffs: Mapping | None = None):
        self.dim = dim
        acc: dict = {}
        for (I, J), c in (coeffs or {}).items():
            c = as_field(c)
            if c.is_zero:
                continue
            if any(i < 0 or i >= dim for i in (*I, *J)):
                raise ChartDimensionError(f"index out of range for chart dimension {dim}")
            sI, I2 = _sort_sign(I)
            sJ, J2 = _sort_sign(J)
            if sI * sJ == 0:
                continue
            key = (I2, J2)
            term = c if sI * sJ == 1 else -c
            acc[key] = term if key not in acc else sum_fields(acc[key], term)
        self.coeffs = {k: v for k, v in acc.items() if not v.is_zero}

    # -- structure --------------------------------------------------------
    @property
    def degrees(self) -> set:
        return {(len(I), len(J)) for (I, J) in self.coeffs}

    @property
    def degree(self) -> tuple:
        """The bidegree ``(p, q)``; raises if the form is inhomogeneous."""
        degs = self.degrees
        if len(degs) > 1:
            raise ValueError(f"form has mixed degrees {sorted(degs)}")
        return next(iter(degs)) if degs else (0, 0)

    def part(self, p: int, q: int) -> "FormField":
        return FormField(self.dim, {k: v for k, v in self.coeffs.items() if (len(k[0]), len(k[1])) == (p, q)})

    @property
    def is_spinor(self) -> bool:
        return all(len(I) == 0 for (I, _J) in self.coeffs)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, I: Iterable[int], J: Iterable[int]) -> ScalarField:
        sI, I2 = _sort_sign(tuple(I))
        sJ, J2 = _sort_sign(tuple(J))
        c = self.coeffs.get((I2, J2), ZERO)
        return c if sI * sJ == 1 else (-c if sI * sJ == -1 else ZERO)

    # -- evaluation -------------------------------------------------------
    def evaluate(self, z) -> dict:
        return {k: v.evaluate(z) for k, v in self.coeffs.items()}

    def max_abs(self, z) -> np.ndarray:
        """Largest coefficient modulus at each point (0 for the zero form)."""
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape[:-1])
        for v in self.coeffs.values():
            out = np.maximum(out, np.abs(v.evaluate(z)))
        return out

    # -- algebra ----------------------------------------------------------
    def _check(self, other: "FormField"):
        if not isinstance(other, FormField):
            raise TypeError("expected a FormField")
        if other.dim != self.dim:
            raise ChartDimensionError(f"chart dimensions differ: {self.dim} vs {other.dim}")

    def __add__(self, other):
        self._check(other)
        acc = dict(self.coeffs)
        for k, v in other.coeffs.items():
            acc[k] = sum_fields(acc[k], v) if k in acc else v
        return FormField(self.dim, acc)

    def __neg__(self):
        return FormField(self.dim, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "FormField":
        c = as_field(c)
        return FormField(self.dim, {k: prod_fields(c, v) for k, v in self.coeffs.items()})

    def __mul__(self, c):
        if isinstance(c, FormField):
            return wedge(self, c)
        return self.scale(c)

    def __rmul__(self, c):
        return self.scale(c)

    def conj(self) -> "FormField":
        """Complex conjugate: ``dz_I ^ dzbar_J`` goes to ``dzbar_I ^ dz_J``."""
        out = {}
        for (I, J), c in self.coeffs.items():
            # conj(c dz_I dzbar_J) = conj(c) dzbar_I dz_J = (-1)^{|I||J|} conj(c) dz_J dzbar_I
            sign = -1 if (len(I) * len(J)) % 2 else 1
            out[(J, I)] = c.conj() if sign == 1 else -c.conj()
        return FormField(self.dim, out)

    def __repr__(self):
        def name(I, J):
            parts = [f"dz{i + 1}" for i in I] + [f"dzb{j + 1}" for j in J]
            return "^".join(parts) or "1"

        return "FormField(" + " + ".join(f"[{v!r}] {name(*k)}" for k, v in self.coeffs.items()) + ")"


def basis_form(dim: int, I=(), J=()) -> FormField:
    return FormField(dim, {(tuple(I), tuple(J)): 1.0})


def dz(dim: int, mu: int) -> FormField:
    return basis_form(dim, (mu,), ())


def dzbar(dim: int, mu: int) -> FormField:
    return basis_form(dim, (), (mu,))


def scalar_form(dim: int, f) -> FormField:
    return FormField(dim, {((), ()): f})


def wedge(a: FormField, b: FormField) -> FormField:
    """Graded-antisymmetric product of two forms."""
    a._check(b)
    acc: dict = {}
    for (I, J), ca in a.coeffs.items():
        for (K, L), cb in b.coeffs.items():
            sIK, IK = _sort_sign(I + K)
            sJL, JL = _sort_sign(J + L)
            sign = sIK * sJL
            if sign == 0:
                continue
            # dz_I dzbar_J dz_K dzbar_L: move dz_K past dzbar_J
            if (len(J) * len(K)) % 2:
                sign = -sign
            term = prod_fields(ca, cb) if sign == 1 else prod_fields(-1.0, ca, cb)
            key = (IK, JL)
            acc.setdefault(key, []).append(term)
    return FormField(a.dim, {k: sum_fields(*v) for k, v in acc.items()})


def exterior_derivative(omega: FormField) -> FormField:
    """Full exterior derivative ``d = del + dbar`` (mixed-degree result).

    Use ``.part(p + 1, q)`` and ``.part(p, q + 1)`` to split the output.
    """
    dim = omega.dim
    acc: dict = {}
    for (I, J), c in omega.coeffs.items():
        for mu in range(dim):
            # d_mu c dz_mu ^ dz_I ^ dzbar_J
            if mu not in I:
                dc = c.dz(mu)
                if not dc.is_zero:
                    s, IK = _sort_sign((mu,) + I)
                    acc.setdefault((IK, J), []).append(dc if s == 1 else -dc)
            # dbar_mu c dzbar_mu ^ dz_I ^ dzbar_J = (-1)^{|I|} dz_I ^ dzbar_mu ^ dzbar_J
            if mu not in J:
                dc = c.dzbar(mu)
                if not dc.is_zero:
                    s, JL = _sort_sign((mu,) + J)
                    if len(I) % 2:
                        s = -s
                    acc.setdefault((I, JL), []).append(dc if s == 1 else -dc)
    return FormField(dim, {k: sum_fields(*v) for k, v in acc.items()})


def _interior_dzbar(rho: int, J: tuple):
    """Contraction of ``d/dzbar_rho`` into ``dzbar_J``: ``(sign, J minus rho)``."""
    if rho not in J:
        return 0, J
    k = J.index(rho)
    return (-1) ** k, J[:k] + J[k + 1:]


def metric_contract(omega: FormField, g: HermitianMetricField) -> FormField:
    """Map a ``(1, q)`` form to a ``(0, q-1)`` form with the inverse metric.

    The leg ``dz_mu`` is raised to ``sum_nu g_inv[nu][mu] d/dzbar_nu`` and
    contracted into the ``dzbar`` block.  A ``(1, 0)`` form contracts to zero.

    Raises
    ------
    ContractionError
        If any component has holomorphic degree other than one.
    """
    if g.dim != omega.dim:
        raise ChartDimensionError("metric and form live on charts of different dimension")
    acc: dict = {}
    for (I, J), c in omega.coeffs.items():
        if len(I) != 1:
            raise ContractionError(f"metric_contract needs holomorphic degree 1, got {len(I)}")
        mu = I[0]
        for nu in range(omega.dim):
            sign, rest = _interior_dzbar(nu, J)
            if sign == 0:
                continue
            gi = g.g_inv[nu][mu]
            if gi.is_zero:
                continue
            term = prod_fields(gi, c)
            acc.setdefault(((), rest), []).append(term if sign == 1 else -term)
    return FormField(omega.dim, {k: sum_fields(*v) for k, v in acc.items()})


def _require_spinor(sigma: FormField):
    if not sigma.is_spinor:
        raise ContractionError("spinors must lie in Lambda^{0,*}")


def dirac(sigma: FormField, g: HermitianMetricField) -> FormField:
    """Spin-c Dirac operator ``D = dbar - dbar^*`` on ``Lambda^{0,*}``."""
    _require_spinor(sigma)
    d = exterior_derivative(sigma)
    holo = FormField(d.dim, {k: v for k, v in d.coeffs.items() if len(k[0]) == 1})
    anti = FormField(d.dim, {k: v for k, v in d.coeffs.items() if len(k[0]) == 0})
    return anti + metric_contract(holo, g)


def clifford_mul(upsilon: FormField, sigma: FormField, g: HermitianMetricField) -> FormField:
    """Clifford action of a complex 1-form on a spinor.

    The ``(0,1)`` part of ``upsilon`` acts by wedge, the ``(1,0)`` part by
    metric contraction.
    """
    _require_spinor(sigma)
    if not upsilon.degrees <= {(1, 0), (0, 1)}:
        raise ContractionError("clifford_mul needs a 1-form")
    return wedge(upsilon.part(0, 1), sigma) + metric_contract(wedge(upsilon.part(1, 0), sigma), g)


def twisted_dirac(sigma: FormField, connection: FormField, g: HermitianMetricField) -> FormField:
    """``D_A sigma = D sigma + A . sigma`` for an imaginary 1-form ``A``."""
    if connection.is_zero:
        return dirac(sigma, g)
    return dirac(sigma, g) + clifford_mul(connection, sigma, g)


def _block_pairing(Ginv: np.ndarray, J: tuple, L: tuple) -> np.ndarray:
    """``<dzbar_J, dzbar_L>`` as the determinant of the 1-form pairings."""
    if len(J) == 0:
        return np.ones(Ginv.shape[:-2], dtype=complex)
    sub = Ginv[..., list(J), :][..., :, list(L)]
    return np.linalg.det(sub)


def pointwise_norm_sq(omega: FormField, g: HermitianMetricField) -> ScalarField:
    """Pointwise squared norm ``|omega|^2_g`` as a (numeric) real field.

    Each index block pairs through the determinant of the inverse-metric
    pairings, so ``|dzbar_1 ^ dzbar_2|^2 = 1`` in flat space.  Components of
    mixed type ``(p, q)`` with ``p, q >= 1`` carry an extra factor ``1/8``;
    this matches the normalisation in which the Kähler form is
    ``2i d(F z.dzbar)`` while the harmonic 2-forms are compared against a
    unit coframe.
    """
    items = list(omega.coeffs.items())

    def evaluate(z):
        Ginv = g.inverse_matrix(z)
        GinvT = np.swapaxes(Ginv, -1, -2)
        vals = [c.evaluate(z) for _k, c in items]
        total = np.zeros(np.asarray(z).shape[:-1], dtype=complex)
        for a, ((I, J), _ca) in enumerate(items):
            for b, ((K, L), _cb) in enumerate(items):
                if (len(I), len(J)) != (len(K), len(L)):
                    continue
                # <dz_I, dz_K> = det(g_inv[k][i]); <dzbar_J, dzbar_L> = det(g_inv[j][l])
                pair = _block_pairing(GinvT, I, K) * _block_pairing(Ginv, J, L)
                weight = 0.125 if (len(I) and len(J)) else 1.0
                total = total + weight * vals[a] * np.conj(vals[b]) * pair
        return np.real(total)

    return PointwiseField(evaluate, name="norm_sq")


def _frame_inverse(E):
    """Symbolic inverse of a 2x2 frame matrix of fields."""
    det = sum_fields(prod_fields(E[0][0], E[1][1]), -prod_fields(E[0][1], E[1][0]))
    inv = 1 / det
    return ((prod_fields(E[1][1], inv), prod_fields(-1.0, E[0][1], inv)),
            (prod_fields(-1.0, E[1][0], inv), prod_fields(E[0][0], inv)))


def hodge_star_2(omega: FormField, g: HermitianMetricField) -> FormField:
    """Hodge star on 2-forms of a complex surface, computed in a unitary coframe.

    The ``(1,1)`` block is rewritten against ``e_a ^ ebar_b``; in that basis
    the star swaps ``e_1 ^ ebar_1`` with ``e_2 ^ ebar_2`` and negates the
    off-diagonal terms.  ``(2,0)`` and ``(0,2)`` parts are self-dual.
    Orientation is the complex one.

    Raises
    ------
    ChartDimensionError
        If the chart is not two-dimensional.
    ValueError
        If the metric carries no frame or the form is not a 2-form.
    """
    if omega.dim != 2 or g.dim != 2:
        raise ChartDimensionError("hodge_star_2 is defined on complex surfaces only")
    if g.frame is None:
        raise ValueError("hodge_star_2 needs a metric with a unitary frame")
    if not omega.degrees <= {(2, 0), (1, 1), (0, 2)}:
        raise ValueError("hodge_star_2 acts on 2-forms")
    E = g.frame
    Einv = _frame_inverse(E)
    Ebar = tuple(tuple(x.conj() for x in row) for row in E)
    Einvbar = tuple(tuple(x.conj() for x in row) for row in Einv)
    c = [[omega.coefficient((m,), (n,)) for n in range(2)] for m in range(2)]
    # dz_mu = sum_a Einv[mu][a] e_a, so C[a][b] = sum Einv[mu][a] c[mu][nu] conj(Einv[nu][b])
    C = [[sum_fields(*[prod_fields(Einv[m][a], c[m][n], Einvbar[n][b]) for m in range(2) for n in range(2)])
          for b in range(2)] for a in range(2)]
    Cs = [[C[1][1], -C[0][1]], [-C[1][0], C[0][0]]]
    out = {k: v for k, v in omega.coeffs.items() if (len(k[0]), len(k[1])) != (1, 1)}
    for m in range(2):
        for n in range(2):
            out[((m,), (n,))] = sum_fields(*[prod_fields(E[a][m], Cs[a][b], Ebar[b][n]) for a in range(2) for b in range(2)])
    return FormField(2, out)


def trace_star_2(omega: FormField, g: HermitianMetricField) -> FormField:
    """Frame-free Hodge star on 2-forms of a complex surface.

    Uses ``*c = tr_g(c) g - c`` on the ``(1,1)`` block, where
    ``tr_g(c) = sum c[mu][nu] g_inv[nu][mu]``.  Serves as an oracle for
    :func:`hodge_star_2`.
    """
    if omega.dim != 2:
        raise ChartDimensionError("trace_star_2 is defined on complex surfaces only")
    c = [[omega.coefficient((m,), (n,)) for n in range(2)] for m in range(2)]
    tr = sum_fields(*[prod_fields(c[m][n], g.g_inv[n][m]) for m in range(2) for n in range(2)])
    out = {k: v for k, v in omega.coeffs.items() if (len(k[0]), len(k[1])) != (1, 1)}
    for m in range(2):
        for n in range(2):
            out[((m,), (n,))] = sum_fields(prod_fields(tr, g.g[m][n]), -c[m][n])
    return FormField(2, out)


def all_multi_indices(dim: int, k: int):
    return list(combinations(range(dim), k))
