"""
Minimizing the Yamabe quotient on a discrete sphere
===================================================

A latitude chain on S^3 carries latitude-dependent fields only.  The constant
field is the minimizer of the round sphere, so the minimized quotient
approaches mu(S^3) = 6 (2 pi^2)^(2/3) as the chain is refined.
"""

import numpy as np

from yamabe import estimate_mu, flat_torus, sphere_latitude, sphere_yamabe

exact = sphere_yamabe(3)
for n in (250, 500, 1000, 2000):
    res = estimate_mu(sphere_latitude(3, n))
    print(f"n={n:5d}  estimate {res.value:.10f}  error {res.value - exact:+.2e}  "
          f"iterations {res.iterations}")

# the flat torus has Yamabe constant 0, attained by constants
res = estimate_mu(flat_torus(3, 8))
print("torus:", res.value, "after", res.iterations, "iterations")

# a random start decreases monotonically towards the same value
res = estimate_mu(sphere_latitude(3, 200))
print("start values:", np.round(res.start_values, 4), "best restart:", res.restart)
