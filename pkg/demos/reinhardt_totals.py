"""Walk through the Reinhardt boundary invariants for every admissible sigma.

Run: python3 demos/reinhardt_totals.py
"""
from crinvariants.crcalc.reinhardt import reinhardt_invariants, total_reinhardt
from crinvariants.exterior import InvariantPolynomial

# tr Xi^k, c_Phi(S) and the local invariant, exactly, n = 2..4
for n in (2, 3, 4):
    for phi in InvariantPolynomial.all_for(n):
        sigma = tuple(phi.sigma)
        inv = reinhardt_invariants(n, sigma)
        print(f"n={n} sigma={sigma}: c_Phi(S) = {inv.c_phi}, I' = {inv.i_prime}, checks ok = {inv.ok}")
    print()

# total over one fundamental domain: symbolic volume vs quadrature
T = total_reinhardt(2, (0, 1), 1)
print("total:", T["total_exact"], "=", T["total"])
print("via quadrature:", T["total_via_quadrature"])
for label, v in T["variants"].items():
    print(f"  closed form with {label}: {v['exact']}")
print("matches:", T["matches_variant"])

# totals scale like r^-(n+1)
for r in ("1/2", "1", "2"):
    print(f"r = {r}: {total_reinhardt(2, (0, 1), r)['total']:.6f}")
