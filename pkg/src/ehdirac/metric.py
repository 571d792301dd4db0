"""Hermitian metrics given as matrices of scalar fields."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fields import ONE, ZERO, ScalarField, as_field

__all__ = ["HermitianMetricField", "flat_metric", "ChartDimensionError"]


class ChartDimensionError(ValueError):
    """Raised when objects living on charts of different dimension are combined."""


def _evaluate_matrix(entries, z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    dim = len(entries)
    out = np.empty(z.shape[:-1] + (dim, dim), dtype=complex)
    for i in range(dim):
        for j in range(dim):
            out[..., i, j] = entries[i][j].evaluate(z)
    return out


@dataclass(frozen=True)
class HermitianMetricField:
    """A Kähler-type Hermitian metric ``g_{mu nubar}`` on a chart of C^dim.

    Parameters
    ----------
    dim : int
        Complex dimension of the chart.
    g : tuple of tuple of ScalarField
        ``g[mu][nu]`` is the coefficient of ``dz_mu dzbar_nu``.
    g_inv : tuple of tuple of ScalarField
        The matrix inverse of ``g`` (``sum_nu g[mu][nu] g_inv[nu][rho] = delta``).
        The pairing of 1-forms is ``<dzbar_nu, dzbar_rho> = g_inv[nu][rho]``.
    det : ScalarField
        ``det g`` (the volume factor ``v_g``).
    frame : tuple of rows or None
        Optional unitary (1,0) coframe as a matrix ``E[a][mu]`` with
        ``e_a = sum_mu E[a][mu] dz_mu`` and ``g = E^T conj(E)``.
    """

    dim: int
    g: tuple
    g_inv: tuple
    det: ScalarField
    frame: tuple | None = None
    name: str = field(default="metric", compare=False)

    def __post_init__(self):
        for mat in (self.g, self.g_inv):
            if len(mat) != self.dim or any(len(row) != self.dim for row in mat):
                raise ChartDimensionError("metric matrices must be dim x dim")
        object.__setattr__(self, "g", tuple(tuple(as_field(x) for x in row) for row in self.g))
        object.__setattr__(self, "g_inv", tuple(tuple(as_field(x) for x in row) for row in self.g_inv))

    def matrix(self, z) -> np.ndarray:
        return _evaluate_matrix(self.g, z)

    def inverse_matrix(self, z) -> np.ndarray:
        return _evaluate_matrix(self.g_inv, z)

    def determinant(self, z) -> np.ndarray:
        return np.real(self.det.evaluate(z))

    def frame_matrix(self, z) -> np.ndarray:
        if self.frame is None:
            raise ValueError(f"{self.name} has no frame attached")
        return _evaluate_matrix(self.frame, z)

    def real_inner(self, z, u, v) -> np.ndarray:
        """Real metric on tangent vectors given by their ``dz`` components.

        ``u``, ``v`` have shape ``(..., dim)`` complex; the value is
        ``Re(u^T G conj(v))``, so that ``|dz|^2`` means ``dx^2 + dy^2``.
        """
        G = self.matrix(z)
        return np.real(np.einsum("...i,...ij,...j->...", u, G, np.conj(v)))


def flat_metric(dim: int) -> HermitianMetricField:
    ident = tuple(tuple(ONE if i == j else ZERO for j in range(dim)) for i in range(dim))
    return HermitianMetricField(dim, ident, ident, ONE, frame=ident, name="flat")
