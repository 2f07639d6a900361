"""
Bounds for a product of spheres
===============================

On S^3 x S^3 the lower bound from the factors, a numerical estimate on a
200 x 200 latitude grid and the sphere ceiling mu(S^6) are compared.  The
product metric is Einstein, so its constant-field value is also shown.
Then the second factor is rescaled by lambda.
"""

import math

from yamabe import MinimizeConfig, lambda_sweep, sandwich, sphere_latitude, sphere_yamabe

mu3 = sphere_yamabe(3)
s3 = sphere_latitude(3, 200)
einstein = 12 * (4 * math.pi**4) ** (1 / 3)
sw = sandwich(s3, s3, mu3, mu3, upper_reference=einstein)
print(f"lower {sw.lower:.4f} <= estimate {sw.estimate:.4f} <= mu(S^6) {sw.upper_sphere:.4f}")
print(f"Einstein value {einstein:.4f}; verdicts {sw.verdict_lower} {sw.verdict_upper}")

# away from lambda = 1 the constant field stops being the minimizer
cfg = MinimizeConfig(restarts=4)
small = sphere_latitude(3, 40)
sweep = lambda_sweep(small, small, [0.25, 0.5, 1.0, 2.0, 4.0], mu3, mu3, cfg)
for lam, point in sweep.points:
    print(f"lambda {lam:5.2f}  estimate {point.estimate:.4f}  restart {point.result.restart}")
print(f"smallest at lambda={sweep.argmin_lambda}; lower {sweep.lower:.4f}; naive {sweep.naive:.4f}")
