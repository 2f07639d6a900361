"""
Dimensional constants and the defect table
==========================================

The conformal exponent, the critical exponent and the Yamabe constant of the
round sphere, followed by the grid of defect factors epsilon_{v,w} for
v, w = 3..7.
"""

import numpy as np

from yamabe import (
    conformal_exponent,
    critical_exponent,
    epsilon_defect,
    sphere_volume,
    sphere_yamabe,
)

print(" m     a_m      p_m      omega_m     mu(S^m)")
for m in range(3, 11):
    print(f"{m:2d} {conformal_exponent(m):8.4f} {critical_exponent(m):8.4f} "
          f"{sphere_volume(m):11.6f} {sphere_yamabe(m):11.6f}")

# epsilon is symmetric and below one; it tends to one as both dimensions grow
dims = np.arange(3, 8)
grid = np.array([[epsilon_defect(v, w) for w in dims] for v in dims])
print("\nepsilon_{v,w}, rows v = 3..7, columns w = 3..7")
print(np.array2string(grid, precision=4, floatmode="fixed"))
print("symmetric:", np.array_equal(grid, grid.T))
print("epsilon_{200,200} =", epsilon_defect(200, 200))
