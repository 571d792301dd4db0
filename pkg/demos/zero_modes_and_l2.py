"""Twisted Dirac zero modes and their L^2 norms.

Run with ``python demos/zero_modes_and_l2.py``.  For each twist ``ell`` the
script lists the closed-form modes on Eguchi-Hanson, checks that the twisted
Dirac operator annihilates them, and compares the predicted normalisability
class with the tag produced by the cutoff analysis.
"""

from fractions import Fraction

import numpy as np

from ehdirac import l2, zero_modes as zm

kappa = 1.0
z = np.array([[0.3 + 0.4j, -0.7 + 0.1j], [1.2, 0.5j], [2.0 - 1.0j, 0.25]])

# %% EH modes for small twists
for ell in (1, 2, 3):
    print(f"ell = {ell}: {zm.count_eh(ell)} normalisable modes")
    for twoN in range(0, ell + 2):
        N = Fraction(twoN, 2)
        m = zm.admissible_m(N)[0]
        spec = zm.eh_spec(N, m, ell, kappa)
        ratio = zm.residual_ratio(spec, z)["ratio"].max()
        res = l2.l2_integral(spec)
        print(f"  N={str(N):>3}  |D sigma|/|sigma| = {ratio:.1e}  "
              f"predicted {zm.classify_eh(N, ell)!s:<28} measured {res.tag!s:<28} value {res.value:.6g}")

# %% higher dimension: the radial profile f_n is no longer elementary
for n in (2, 3):
    spec = zm.general_spec((1,) + (0,) * n, ell=n + 2, kappa=kappa)
    res = l2.l2_integral(spec)
    ratio = zm.residual_ratio(spec, np.array([[0.4, 0.3j] + [0.2] * (n - 1)]))["ratio"].max()
    print(f"n={n}, delta=1, ell={n + 2}: residual {ratio:.1e}, {res.tag}, value {res.value:.6g}")
