"""
Perturbation series around a constant barrier
=============================================

Write ``v = z1 + s f(x)`` with a gain profile ``f`` and expand the Jost
function ``Gamma_{1-}`` in powers of ``s``.  The truncated series is checked
against direct integration of the full potential.
"""

import numpy as np

from specsing import perturbation as pt
from specsing.potential import Barrier, GainProfile
from specsing.transfer import gamma_1_minus

z1, k = 30 + 10j, 6.0
profile = GainProfile("single", 0.5)
basis = pt.make_basis_barrier(z1, k)

# coefficients Gamma^(0..3); the first one is the closed-form barrier value
c = pt.jost_coefficients(basis, profile, 3)
print("Gamma^(0):", c[0], " closed form:", pt.barrier_F0(basis.fn, k))
print("Gamma^(1):", c[1], " moments:", pt.barrier_F1(basis.fn, k, profile))

# the error of the cubic partial sum falls off like s^4
for s in (0.3, 0.15, 0.075):
    exact = gamma_1_minus(Barrier(z1, 1.0, s, profile), k, tol=1e-13)
    err = abs(np.polyval(c[::-1], s) - exact)
    print(f"s = {s:<6} error = {err:.2e}  error/s^4 = {err / s**4:.3e}")
