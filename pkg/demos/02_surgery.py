"""
Surgery constants
=================

Lambda_{m,k} bounds how far k-dimensional surgery can lower the smooth
Yamabe invariant.  For each m we list every admissible k and the minimum.
"""

from yamabe import lambda_argmin, lambda_min, lambda_surgery

for m in range(6, 13):
    per_k = [lambda_surgery(m, k) for k in range(2, m - 3)]
    row = "  ".join(f"{x:9.4f}" for x in per_k)
    print(f"m={m:2d}  min {lambda_min(m):9.4f} at k={lambda_argmin(m)}   [{row}]")

# k and m-k-2 give the same constant
print(lambda_surgery(11, 2) == lambda_surgery(11, 7))
