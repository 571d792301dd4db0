"""Eguchi-Hanson geometry in the (z_1, z_2) chart.

Run with ``python demos/eh_geometry_tour.py``.  Prints the metric at a few
points, checks closedness and duality of the two harmonic 2-forms, and shows
how the metric approaches the flat one at large ``s``.
"""

import numpy as np

from ehdirac import eh
from ehdirac.forms import exterior_derivative

kappa = 1.0
rng = np.random.default_rng(7)
z = rng.normal(size=(6, 2)) + 1j * rng.normal(size=(6, 2))

# %% metric and its inverse
g = eh.eh_metric(kappa)
G = g.matrix(z)
Ginv = g.inverse_matrix(z)
print("max |G Ginv - 1|:", np.max(np.abs(G @ Ginv - np.eye(2))))
print("min eigenvalue of G:", np.min(np.linalg.eigvalsh(G)))

# %% Kahler form and the L^2 harmonic form
omega = eh.kahler_form(kappa)
omega_t = eh.l2_form(kappa)
print("max |d omega|:", exterior_derivative(omega).max_abs(z).max())
print("max |d omega~|:", exterior_derivative(omega_t).max_abs(z).max())
print("theta_3 identity residual:", eh.theta3_identity_residual(kappa, z).max())

# %% flat limit: G approaches the identity as s grows
for scale in (1.0, 10.0, 100.0):
    pt = np.array([[scale, 0.5j * scale]])
    print(f"|G - 1| at |z| ~ {scale:>5g}:", np.max(np.abs(eh.eh_metric(kappa).matrix(pt) - np.eye(2))))
