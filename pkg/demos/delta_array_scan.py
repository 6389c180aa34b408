"""
Spectral singularities of a delta array
=======================================

A point scatterer with imaginary coupling ``z = i beta`` has a single
spectral singularity at ``k = beta/2``.  Adding a second scatterer moves it;
the closed-form transfer matrix makes the scan cheap.
"""

import numpy as np

from specsing.deltas import (
    Strategy,
    closed_form_matrix,
    composition_oracle,
    find_singularities_delta,
)
from specsing.potential import DeltaArray

# one delta: M22 = 1 + iz/2k vanishes at k = beta/2
one = DeltaArray([0.3], [10j])
print("single delta:", [r.k for r in find_singularities_delta(one, (1, 10))])

# the closed form and the product of single-delta matrices agree
three = DeltaArray([0.2, 0.5, 0.8], [4 + 3j, -2j, 6.0])
k = 7.0
diff = closed_form_matrix(three, k).as_array() - composition_oracle(three, k).as_array()
print("closed form vs composition:", np.max(np.abs(diff)))

# a second, real scatterer destroys it: |M22| stays away from zero
pair = DeltaArray([0.3, 0.7], [10j, 2.0])
ks = np.linspace(1, 10, 901)
print("pair: roots", find_singularities_delta(pair, (1, 10)),
      f"min |M22| = {min(abs(closed_form_matrix(pair, k).m22) for k in ks):.3f}")

# or ask which coupling of the first delta puts a singularity at each k
for r in find_singularities_delta(pair, (4, 6), Strategy.SOLVE_ONE_COUPLING, n_grid=5):
    z = r.spec.couplings[0]
    print(f"k = {r.k:.2f} needs z1 = {z.real:+.6f} {z.imag:+.6f}i")
