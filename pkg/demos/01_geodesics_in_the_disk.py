"""
Weighted distances in the unit disk
===================================

The omega-distance between two points is the infimum of the weighted length
of the curves joining them. Here we compute it numerically by shortening a
polyline, and we compare the result with the closed forms that exist for the
hyperbolic and spherical weights.
"""

import numpy as np

from blochlip.omega_distance import GeodesicConfig, lim_ratio_check, omega_distance
from blochlip.weights import hyperbolic, spherical

# Two points on the same side of the origin. The hyperbolic geodesic through
# them is an arc of a circle orthogonal to the boundary, so the straight chord
# is not optimal and the descent has to bend it.
x = np.array([0.6, 0.1])
y = np.array([0.1, 0.7])

w = hyperbolic()
res = omega_distance(x, y, w, GeodesicConfig(control_points=33))
exact = float(w.exact_distance(x, y))
print(f"hyperbolic: polyline {res.value:.10f}  closed form {exact:.10f}")
print(f"  relative gap {abs(res.value - exact) / exact:.2e} after {res.iterations} iterations")

# The middle control point should sit off the chord, toward the origin.
mid = res.path.points[len(res.path.points) // 2]
print(f"  midpoint of the optimised path: {np.round(mid, 4)} (chord midpoint {0.5 * (x + y)})")

# %%
# The spherical weight lives on the whole plane and its distance never
# exceeds pi / 2. Far from the origin the short way goes around infinity.
s = spherical()
for far in (2.0, 10.0, 100.0):
    a, b = np.array([far, 0.0]), np.array([0.0, far])
    d = omega_distance(a, b, s).value
    print(f"spherical, |x| = |y| = {far:6.1f}: {d:.6f}  closed form {float(s.exact_distance(a, b)):.6f}")

# The descent is local. For exactly opposite points the straight chord through
# the origin is a critical path, so it never leaves it, and the result is a
# valid but poor upper bound. Nudging one endpoint breaks the symmetry.
a = np.array([2.0, 0.0])
for b in (np.array([-2.0, 0.0]), np.array([-2.0, 0.1])):
    d = omega_distance(a, b, s).value
    print(f"  {a} -> {b}: {d:.6f}  closed form {float(s.exact_distance(a, b)):.6f}")

# %%
# Near the diagonal the distance is first-order equal to w(x) |x - y|.
table = lim_ratio_check(x, w, [1e-1, 1e-2, 1e-3], directions=8)
print(f"w(x) = {table.weight_at_point:.6f}")
for row in table.rows:
    print(f"  r = {row.radius:.0e}: d / r in [{row.min_ratio:.6f}, {row.max_ratio:.6f}]")
