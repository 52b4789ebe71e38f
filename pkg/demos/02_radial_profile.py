"""The degree-one radial profile f(r), solved by shooting.

f solves f'' + f'/r - f/r^2 = f (f^2 - 1) with f(0) = 0 and f(inf) = 1.
The shooting parameter is the slope at the origin; the far field obeys
f(r) = 1 - 1/(2 r^2) + O(r^-4), which the table below makes visible.
"""

import numpy as np

import glvortex as gl

p = gl.solve_profile(r_max=20.0, tol=1e-10)
print(f"slope at the origin: {p.slope0:.12f}")
print(f"shooting residual:   {p.residual:.2e}\n")

print("   r      f(r)      1 - f(r)    1/(2 r^2)")
for r in (2.0, 5.0, 10.0, 20.0):
    print(f"{r:5.1f}  {p(r):.6f}  {1 - p(r):.3e}  {1 / (2 * r * r):.3e}")
