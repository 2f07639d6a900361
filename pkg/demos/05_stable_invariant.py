"""
The stable invariant of spheres
===============================

Sigma(S^(v+n)) / Sigma(S^n) tends to (pi e / 2)^v, and Sigma(S^v) itself
follows the Stirling asymptote 2 e^-2 (pi e / 2)^v.  Both are evaluated in
log space, so very large dimensions are fine.
"""

from yamabe import sigma_sphere, sigma_sphere_asymptote, stable_ratio_limit

v = 3
target = stable_ratio_limit(v)
for n in (10, 50, 100, 500, 5000):
    ratio = (sigma_sphere(v + n) / sigma_sphere(n)).exp()
    print(f"n={n:5d}  ratio {ratio:.8f}  relative error {abs(ratio / target - 1):.2e}")

for v in (10, 100, 1000, 100000):
    log_ratio = (sigma_sphere(v) / sigma_sphere_asymptote(v)).log
    print(f"v={v:6d}  log(Sigma / asymptote) = {log_ratio:+.3e}")
