"""Powers of the torsion endomorphism Theta_a^b = i theta_a tau^b - i tau_a theta^b.

The only relations used are theta^g tau_g = 0 and its conjugate, so the closed
forms hold for any torsion.  With q = tau^g tau_g:

    Theta^(2s+1) = (-i q dtheta)^s Theta
    Theta^(2s)   = (-i q dtheta)^(s-1) (q theta_a theta^b - i tau_a tau^b dtheta),  s >= 1
"""
from __future__ import annotations

import random
from fractions import Fraction

from ..exterior import EndoFormMatrix, GrassmannContext, mat_power
from ..tensorlang import TensorExpr
from .bridge import Bridge
from .context import AL, BE, Forms, base_relations, matpow
from .report import SuiteReport, compare, timed


def _objects(rel):
    F = Forms(rel)
    i = F.i
    Theta = (rel.term(i, (), [("thd", (AL,)), ("tau_u", (BE,))])
             - rel.term(i, (), [("tau_d", (AL,)), ("thu", (BE,))]))
    q = rel.term(1, (), [("tau_u", ("g",)), ("tau_d", ("g",))])
    return F, Theta, q


def theta_power_closed_form(rel, k: int) -> TensorExpr:
    F, Theta, q = _objects(rel)
    i = F.i
    base = q * F.dtheta() * (-i)
    if k == 0:
        return F.ident()
    s, odd = divmod(k, 2)
    if odd:
        return (base ** s) * Theta if s else Theta
    even = (q * rel.term(1, (), [("thd", (AL,)), ("thu", (BE,))])
            - rel.term(i, (), [("tau_d", (AL,)), ("tau_u", (BE,))]) * F.dtheta())
    return (base ** (s - 1)) * even if s > 1 else even


def symbolic_cases(smax: int = 3) -> list:
    rel = base_relations(sphere=False, torsion=True)
    F, Theta, q = _objects(rel)
    cases = []
    for k in range(0, 2 * smax + 2):
        with timed() as tm:
            lhs = F.ident() if k == 0 else matpow(Theta, k)
            rhs = theta_power_closed_form(rel, k)
        case = compare(f"theta-power-{k}", "torsion endomorphism power law, symbolic n", lhs, rhs)
        case.wall_time = tm["t"]
        cases.append(case)
    return cases


def _random_symmetric(n: int, rng: random.Random):
    def q():
        return Fraction(rng.randint(-9, 9), rng.randint(1, 5))
    B = [[None] * n for _ in range(n)]
    for a in range(n):
        for b in range(a, n):
            B[a][b] = B[b][a] = (q(), q())   # real and imaginary parts
    return B


def concrete_cases(n: int, seed: int = 0, smax: int = 3) -> list:
    """Generic torsion tau^a = B_ab theta_b, tau_a = conj(B)_ab theta^b with B symmetric."""
    rng = random.Random(seed)
    G = GrassmannContext(n)
    i = G.sym("i")
    B = _random_symmetric(n, rng)

    def cplx(re, im, conj=False):
        return G.scalar(re) + G.scalar(-im if conj else im) * i

    def tau_u(a):
        return sum((G.down(b) * cplx(*B[a][b]) for b in range(n)), G.zero())

    def tau_d(a):
        return sum((G.up(b) * cplx(*B[a][b], conj=True) for b in range(n)), G.zero())

    Theta = EndoFormMatrix.build(G, lambda a, b: (G.down(a) * tau_u(b) - tau_d(a) * G.up(b)) * i)
    q = sum((tau_u(g) * tau_d(g) for g in range(n)), G.zero())
    base = q * G.dtheta() * (-i)
    even = EndoFormMatrix.build(G, lambda a, b: q * G.down(a) * G.up(b) - tau_d(a) * tau_u(b) * G.dtheta() * i)

    rel = base_relations(sphere=False, torsion=True)
    bridge = Bridge(G, oneforms={"tau_u": tau_u, "tau_d": tau_d})
    cases = []
    for k in range(1, 2 * smax + 2):
        s, odd = divmod(k, 2)
        with timed() as tm:
            lhs = mat_power(Theta, k)
            if odd:
                rhs = Theta.wedge_form(base ** s, left=True)
            else:
                rhs = even.wedge_form(base ** (s - 1), left=True)
            via_symbolic = bridge.matrix(theta_power_closed_form(rel, k))
        c1 = compare(f"theta-power-{k}-n{n}", "torsion endomorphism power law, generic symmetric torsion", lhs, rhs)
        c1.wall_time = tm["t"]
        c2 = compare(f"theta-power-{k}-n{n}-bridged", "symbolic closed form specialized to n", lhs, via_symbolic)
        cases += [c1, c2]
    return cases


def verify_theta_powers(n="symbolic", smax: int = 3, seed: int = 0) -> SuiteReport:
    rep = SuiteReport("theta-powers")
    if n == "symbolic":
        rep.extend(symbolic_cases(smax))
    else:
        rep.extend(concrete_cases(int(n), seed, smax))
    return rep
