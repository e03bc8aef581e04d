"""Local invariants and total I'-curvature of the log-ball Reinhardt boundaries.

In the homogeneous frame h = id, A = -i id, tau^a = i theta_a, tau_a = -i theta^a,
V = U = 0 and P_{a bbar} = n/(2(n+1)) h.  Xi is built two ways: from the Chern
tensor components, and as Sigma + L from the torsion.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, pi

import numpy as np

from ..exterior import EndoFormMatrix, GrassmannContext, InvariantPolynomial, char_form, trace
from ..hypersurface_num import delta_phi_contract, phi_class, volume_quadrature
from .report import CaseResult, SuiteReport, compare, numeric_case, timed


def chern_components(n: int) -> dict:
    """S_{a bbar c dbar} = (1/(n+1))(d_ab d_cd + d_ad d_cb) - A_ac conj(A)_bd with A = -i id."""
    S = {}
    for a in range(n):
        for b in range(n):
            for c in range(n):
                for d in range(n):
                    v = Fraction((a == b) * (c == d) + (a == d) * (c == b), n + 1)
                    S[a, b, c, d] = v - ((a == c) and (b == d))
    return S


def xi_from_chern(G: GrassmannContext) -> EndoFormMatrix:
    n = G.n
    S = chern_components(n)

    def entry(a, b):
        f = G.zero()
        for m in range(n):
            for v in range(n):
                if S[a, b, m, v]:
                    f = f + (G.up(m) * G.down(v)) * S[a, b, m, v]
        return f

    return EndoFormMatrix.build(G, entry)


def sigma_and_l(G: GrassmannContext):
    n = G.n
    i = G.sym("i")
    dth = G.dtheta()
    tau_u = lambda a: G.down(a) * i
    tau_d = lambda a: G.up(a) * (-i)
    Sig = EndoFormMatrix.build(
        G, lambda a, b: ((dth * (-i) if a == b else G.zero()) + G.up(b) * G.down(a)) * Fraction(1, n + 1))
    L = EndoFormMatrix.build(G, lambda a, b: -(tau_d(a) * tau_u(b)))
    return Sig, L


def product_of_factors(n: int, sigma) -> int:
    out = 1
    for k, s in enumerate(sigma, start=1):
        out *= ((n + 2) * (1 - (n + 2) ** (k - 1))) ** s
    return out


def c_phi_display(n: int, sigma) -> Fraction:
    return Fraction(factorial(n), (n + 1) ** n) * product_of_factors(n, sigma)


def i_prime_display(n: int, sigma) -> Fraction:
    return -Fraction(factorial(n), (n + 1) ** (n + 1)) * product_of_factors(n, sigma)


def tr_xi_coefficient(n: int, k: int) -> Fraction:
    return Fraction((n + 2) * (1 - (n + 2) ** (k - 1)), (n + 1) ** k)


def c_phi_by_contraction(n: int, sigma) -> Fraction:
    """Exact c_Phi(S) from the delta/Phi contraction of the integer tensor (n+1) S."""
    S = chern_components(n)
    arr = np.zeros((n,) * 4, dtype=complex)
    for key, v in S.items():
        arr[key] = int(v * (n + 1))
    # with h = id the raised array S_b^a_d^c is S[b, a, d, c]
    m = len(sigma)
    bound = float(np.max(np.abs(arr))) ** m * n ** (2 * m) * factorial(m) * len(phi_class(sigma))
    if bound >= 2 ** 53:
        raise OverflowError("contraction is not exact in double precision")
    raw = delta_phi_contract(arr, sigma)
    if raw.imag != 0 or raw.real != round(raw.real):
        raise ArithmeticError(f"contraction is not an integer: {raw}")
    return Fraction(int(round(raw.real)), (n + 1) ** m * len(phi_class(sigma)))


@dataclass
class ReinhardtInvariants:
    n: int
    sigma: tuple
    tr_xi: dict = field(default_factory=dict)
    c_phi: Fraction | None = None
    i_prime: Fraction | None = None
    cases: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.cases)


def _form_case(case_id, anchor, actual, expected, expected_text):
    c = compare(case_id, anchor, actual, expected)
    c.expected = expected_text
    return c


def reinhardt_invariants(n: int, sigma, table_checks: bool = True) -> ReinhardtInvariants:
    phi = InvariantPolynomial(sigma)
    if phi.degree != n:
        raise ValueError(f"sigma {sigma} has degree {phi.degree}, not {n}")
    if n < 2:
        raise ValueError("need n >= 2")
    res = ReinhardtInvariants(n, tuple(sigma))
    G = GrassmannContext(n)
    i = G.sym("i")
    dth = G.dtheta()
    midth = dth * (-i)
    Xi = xi_from_chern(G)
    Sig, L = sigma_and_l(G)
    anchor_tab = "multiplication table of Sigma and L"

    with timed() as tm:
        cases = [compare(f"Xi-split-n{n}", "Xi from the Chern tensor equals Sigma + L", Xi, Sig + L)]
        if table_checks:
            cases += [
                compare(f"tr-Sigma-n{n}", anchor_tab, trace(Sig), midth),
                compare(f"tr-L-n{n}", anchor_tab, trace(L), dth * i),
                compare(f"Sigma.Sigma-n{n}", anchor_tab, Sig @ Sig, Sig.wedge_form(midth * Fraction(1, n + 1), left=True)),
                compare(f"L.Sigma-n{n}", anchor_tab, L @ Sig, L.wedge_form(midth * Fraction(1, n + 1), left=True)),
                compare(f"Sigma.L-n{n}", anchor_tab, Sig @ L, L.wedge_form(midth * Fraction(1, n + 1), left=True)),
                compare(f"L.L-n{n}", anchor_tab, L @ L, L.wedge_form(midth, left=True)),
            ]
        P = Xi
        for k in range(1, n + 2):
            if k > 1:
                P = P @ Xi
            coef = tr_xi_coefficient(n, k)
            res.tr_xi[k] = coef
            cases.append(_form_case(f"tr-Xi-{k}", "trace of powers of Xi", trace(P), midth ** k * coef,
                                    f"({coef})(-i dθ)^{k}"))
    for c in cases:
        c.wall_time = tm["t"] / len(cases)
    res.cases += cases

    with timed() as tm:
        top = char_form(phi, Xi.scale(i))
        ref = dth ** n
        unit = (-i) ** n
        q = top.ratio_to(ref * unit)
        q = None if q is None else q * unit * factorial(n)
        if q is None or not q.is_constant():
            raise ArithmeticError("c_Phi(i Xi) is not a real constant multiple of dtheta^n")
        from_forms = q.constant_term().evaluate(n)
        from_contraction = c_phi_by_contraction(n, sigma)
        expected = c_phi_display(n, sigma)
    res.c_phi = from_forms
    P_scalar = Fraction(n * n, 2 * (n + 1))
    laplacian, v_terms, u_terms = 0, 0, 0  # parallel S, V = 0, U = 0
    assembled = Fraction(laplacian, n ** 3) - Fraction(2, n * n) * P_scalar * from_forms + v_terms - u_terms
    res.i_prime = assembled
    cases = [
        compare(f"cphi-S-forms-n{n}", "c_Phi(S) read off from c_Phi(i Xi)", from_forms, expected),
        compare(f"cphi-S-contraction-n{n}", "c_Phi(S) by delta/Phi contraction", from_contraction, expected),
        compare(f"Iprime-n{n}", "I' curvature of the Reinhardt boundary", assembled, i_prime_display(n, sigma)),
        compare(f"Iprime-vs-cphi-n{n}", "I' equals -c_Phi(S)/(n+1) here", assembled, -from_forms / (n + 1)),
    ]
    for c in cases:
        c.wall_time = tm["t"] / len(cases)
    res.cases += cases
    return res


# ---------------------------------------------------------------------------
# totals


def sphere_volume_exact(n: int) -> tuple[Fraction, int]:
    """Vol(S^n(1)) = K pi^e, returned as (K, e)."""
    if n % 2:
        m = (n + 1) // 2
        return Fraction(2, factorial(m - 1)), m
    m = n // 2
    return Fraction(2 ** (n + 1) * factorial(m), factorial(n)), m


@dataclass
class PiPower:
    """K pi^e r^(-d); r is kept as a number."""
    K: Fraction
    e: int
    d: int
    r: Fraction

    def value(self) -> float:
        return float(self.K) * pi ** self.e / float(self.r) ** self.d

    def exact(self):
        return (self.K / self.r ** self.d, self.e) if isinstance(self.r, Fraction) else None

    def __str__(self):
        K = self.K / self.r ** self.d if isinstance(self.r, Fraction) else self.K
        tail = "" if isinstance(self.r, Fraction) else f" r^-{self.d}"
        return f"({K}) π^{self.e}{tail}"


def _as_fraction(r):
    try:
        return Fraction(str(r))
    except (ValueError, TypeError):
        return r


def total_reinhardt(n: int, sigma, r=1, resolution: int = 24) -> dict:
    """Total I' = I' * volume, with volume = n! (pi/r)^(n+1) Vol(S^n(1)).

    Also evaluates the two closed forms -(n!)^2 Vol(S^n(1)) (c pi/((n+1) r))^(n+1) prod(...)
    with c = 1 and c = 2, and reports which one agrees.
    """
    r = _as_fraction(r)
    if not float(r) > 0:
        raise ValueError("r must be positive")
    inv = reinhardt_invariants(n, sigma, table_checks=False)
    K, e = sphere_volume_exact(n)
    vol = PiPower(factorial(n) * K, e + n + 1, n + 1, r)
    total = PiPower(inv.i_prime * vol.K, vol.e, n + 1, r)
    prod = product_of_factors(n, sigma)
    variants = {}
    for label, c in (("pi/((n+1)r)", 1), ("2pi/((n+1)r)", 2)):
        variants[label] = PiPower(-Fraction(factorial(n) ** 2) * K * Fraction(c, n + 1) ** (n + 1) * prod,
                                  e + n + 1, n + 1, r)
    matches = [lab for lab, v in variants.items() if (v.K, v.e) == (total.K, total.e)]
    vol_quad = volume_quadrature(n, float(r), resolution)
    return {
        "n": n, "sigma": list(sigma), "r": str(r),
        "i_prime": str(inv.i_prime),
        "volume_exact": str(vol), "volume": vol.value(), "volume_quadrature": vol_quad,
        "total_exact": str(total), "total": total.value(),
        "total_via_quadrature": float(inv.i_prime) * vol_quad,
        "variants": {lab: {"exact": str(v), "value": v.value()} for lab, v in variants.items()},
        "matches_variant": matches[0] if len(matches) == 1 else None,
        "local_cases": inv.cases,
    }


def totals_cases(n: int, sigma, r=1, resolution: int = 24, tol: float = 1e-6) -> list:
    with timed() as tm:
        T = total_reinhardt(n, sigma, r, resolution)
    tag = f"n{n}-{''.join(map(str, sigma))}"
    cases = [
        numeric_case(f"total-closed-vs-quadrature-{tag}", "total I' from the closed-form and quadrature volumes",
                     T["total_via_quadrature"], T["total"], tol),
        CaseResult(f"total-variant-{tag}", "which closed form for the total agrees with the computed chain",
                   "pass" if T["matches_variant"] is not None else "fail",
                   "exactly one variant", str(T["matches_variant"]),
                   f"computed {T['total_exact']}; variants " +
                   ", ".join(f"{k}: {v['exact']}" for k, v in T["variants"].items())),
    ]
    for c in cases:
        c.wall_time = tm["t"] / len(cases)
    return cases, T


def run_reinhardt_suite(ns=(2, 3, 4), sigma=None) -> SuiteReport:
    rep = SuiteReport("reinhardt")
    for n in ns:
        sigmas = [tuple(sigma)] if sigma is not None else [tuple(p.sigma) for p in InvariantPolynomial.all_for(n)]
        for s in sigmas:
            inv = reinhardt_invariants(n, s)
            tag = "-".join(["", f"n{n}", "".join(map(str, s))]) if len(ns) > 1 or sigma is None else ""
            for c in inv.cases:
                if tag and not c.case_id.endswith(f"n{n}"):
                    c.case_id += tag
                elif tag:
                    c.case_id += "-" + "".join(map(str, s))
            rep.extend(inv.cases)
    return rep
