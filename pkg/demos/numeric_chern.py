"""Floating-point Chern tensor on model hypersurfaces and finite differences in t.

Run: python3 demos/numeric_chern.py
"""
import numpy as np

from crinvariants import hypersurface_num as H

rng = np.random.default_rng(0)
z = rng.normal(size=3) + 1j * rng.normal(size=3)
z /= np.linalg.norm(z)

C = H.chern_tensor_at(H.sphere(2), z)
print("sphere |S|:", np.linalg.norm(C.S))  # the sphere is CR flat

tube = H.reinhardt_tube(2)
p = np.array([0.5, 0.0, 0.0], complex) + 1j * rng.normal(size=3)
print("Reinhardt c_Phi(S):", H.scalar_invariant_at(tube, p, (0, 1)), "(exact -8/3)")

# second t-derivative at t = 0 along a few directions
for u in (np.array([0, 1, 0], complex), z):
    rep = H.perturbation_fd_check(2, (0, 1), u)
    print(f"c = {rep.c:.5f}: FD {rep.estimate:.10f} vs -27c^4 {rep.expected:.10f} (rel {rep.rel_error:.1e})")

# volume of a fundamental domain
for m in (4, 8, 16, 24):
    print(m, H.volume_quadrature(2, 1.0, m), H.volume_closed_form(2))
