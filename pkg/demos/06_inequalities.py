"""
Checking the inequalities behind the product bound
==================================================

Random fields on random small products are fed through the iterated Hoelder
inequality, the partial gradient estimate and Young's inequality.  The replay
then walks one field through every stage of the lower-bound argument.
"""

import numpy as np

from yamabe import (
    check_iterated_holder,
    check_partial_gradient,
    check_young,
    random_manifold,
    replay_product_bound,
    sphere_latitude,
)

rng = np.random.default_rng(1)
worst = {"holder": np.inf, "gradient": np.inf}
for _ in range(500):
    a = random_manifold(rng, 3, 5)
    b = random_manifold(rng, 4, 4)
    u = rng.normal(size=(5, 4))
    worst["holder"] = min(worst["holder"], check_iterated_holder(a, b, u).slack)
    worst["gradient"] = min(worst["gradient"], check_partial_gradient(a, b, np.abs(u)).slack)
print("smallest slacks:", worst)
print("Young at c=2, d=1:", check_young(2.0, 1.0, 3, 3))

# every stage is at least the next one
replay = replay_product_bound(sphere_latitude(3, 30), sphere_latitude(4, 20), rng.uniform(0.2, 1.0, 600))
for name, value in zip(["quotient", "split", "factorwise", "young", "bound"], replay.stages):
    print(f"{name:>10s} {value:.6f}")
