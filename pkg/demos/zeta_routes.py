"""Evaluate a spherical function by every route and compare.

Run with ``python demos/zeta_routes.py``.
"""

import numpy as np

from sl2harmonic import spherical as sph

n, s = 1.5, 0.5 + 2.0j
t = np.array([0.0, 0.5, 1.0, 2.0, 4.0])

print(f"zeta_(n={n}, s={s})(a_t)")
print(f"{'t':>5} {'auto':>24} {'max route spread':>18}")
for x in t:
    vals = [sph.zeta_axis(n, s, x, r) for r in ("theta_integral", "cosine_integral", "definition")]
    if sph.route_applicable("hyper", n, s, x):
        vals.append(sph.zeta_axis(n, s, x, "hyper"))
    spread = max(abs(a - b) for a in vals for b in vals)
    z = sph.zeta_axis(n, s, x)
    print(f"{x:5.2f} {z.real:+.15f}{z.imag:+.1e}i {spread:18.2e}")

print("\nlarge-t expansion against direct evaluation (n = 1, lam = 2)")
for x in (2.0, 4.0, 8.0):
    e = sph.global_expansion(1.0, 2.0, x)
    err = abs(e.value - sph.zeta_axis(1.0, 0.5 + 2.0j, x))
    print(f"t = {x:4.1f}: error {err:.2e}, attached estimate {e.error_estimate:.2e}")
