"""
Lasing threshold of a non-uniformly pumped slab
===============================================

A 300 um semiconductor slab pumped from one face (or both) has a gain
coefficient that decays into the sample.  For each longitudinal mode we solve
the homogeneous slab exactly, shift the threshold to first order in the
decay constant ``nu``, and compare with a direct Newton solve on the full
potential.
"""

from specsing.singularity import first_order_singularity, full_numeric_singularity, solve_unperturbed
from specsing.slab import REFERENCE_MEDIUM, table1_pipeline

medium = REFERENCE_MEDIUM
print(medium)

for m in (1358, 1360, 1362):
    r = solve_unperturbed(medium, m)
    print(f"mode {m}: lambda0 = {r.lambda_nm:.9f} nm, g0 = {r.g0_per_cm:.5f} /cm")

print("\nm     nu   pumping  lambda*            g*")
for r in table1_pipeline(medium, [1360], [0.0, 0.1, 0.2, 0.3, 0.5], residuals=False):
    print(f"{r.mode_m} {r.nu:4.1f}  {r.pumping:7}  {r.lambda_star:.9f}  {r.g_star:.5f}")

# first order against the full-potential oracle: the gap is O(nu^2)
for nu in (0.2, 0.1, 0.05):
    m = medium.replace(nu=nu)
    a = first_order_singularity(m, 1360, residual=False)
    f = full_numeric_singularity(m, 1360)
    print(f"nu = {nu:<5} first order g* = {a.g_star:.6f}  full = {f.g_star:.6f}  gap = {f.g_star - a.g_star:.2e}")
