"""
Three ways to the same transfer matrix
======================================

A delta array has an exact transfer matrix.  The ODE integrator cannot take
deltas directly, but rectangles of width ``w`` and height ``z/w`` converge to
them linearly in ``w``; Richardson extrapolation removes the error terms one
order at a time.
"""

import numpy as np

from specsing.deltas import closed_form_matrix, regularized_oracle, regularized_potential
from specsing.potential import DeltaArray
from specsing.transfer import transfer_matrix

spec = DeltaArray([0.3, 0.6], [5 + 2j, -3 + 4j])
k = 8.0
exact = closed_form_matrix(spec, k).as_array()

for w in (0.02, 0.01, 0.005, 0.0025):
    m = transfer_matrix(regularized_potential(spec, w), k).as_array()
    print(f"w = {w:<7} |M(w) - M| = {np.max(np.abs(m - exact)):.3e}")

m = regularized_oracle(spec, k).as_array()
print("extrapolated:", f"{np.max(np.abs(m - exact)):.3e}")
print("det M - 1:", abs(np.linalg.det(exact) - 1))
