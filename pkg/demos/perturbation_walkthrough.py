"""Quartic perturbation of the sphere: symbolic identities, then the n-th variation.

Run: python3 demos/perturbation_walkthrough.py
"""
from crinvariants.crcalc.perturbation import run_symbolic_suite
from crinvariants.crcalc.variation import x_phi_nth_derivative

rep = run_symbolic_suite(kmax=4)
print(rep.summary())
for c in rep.cases:
    if c.case_id.startswith("tr-Cdot"):
        print(f"{c.case_id:14s} {c.expected}")

# concrete n: c_Phi(Cdot), the X variation and its divergence, as polynomials in c
for n, sigma in ((2, (0, 1)), (3, (0, 0, 1))):
    res = x_phi_nth_derivative(n, sigma)
    print(f"\nn = {n}, sigma = {sigma}")
    print("  c_Phi(Cdot) / dtheta^n:", res.f)
    print("  X:", res.X)
    print("  div X:", res.divergence)
    print("  all checks:", res.ok)
