from fractions import Fraction
from math import pi

import numpy as np
import pytest

from crinvariants.crcalc import context as cx
from crinvariants.crcalc.kronecker import kronecker_case, kronecker_vanishing_check, random_chern_like
from crinvariants.crcalc.perturbation import build_perturbation, run_symbolic_suite, symbolic_objects
from crinvariants.crcalc.reinhardt import (c_phi_by_contraction, reinhardt_invariants, run_reinhardt_suite,
                                           total_reinhardt, totals_cases)
from crinvariants.crcalc.theta import theta_power_closed_form, verify_theta_powers
from crinvariants.crcalc.variation import c_phi_n_minus_1, run_variation_suite, x_phi_nth_derivative
from crinvariants.exterior import EndoFormMatrix, GrassmannContext, InvariantPolynomial, char_form, trace
from crinvariants.hypersurface_num import delta_phi_contract
from crinvariants.symkernel import DimRational

N = DimRational.n()
R = (N + 1) / (N + 2)


def _all_pass(rep):
    bad = [(c.case_id, c.residual) for c in rep.cases if c.status != "pass"]
    assert not bad, bad


# theta powers -------------------------------------------------------------

def test_theta_low_powers_explicit():
    rel = cx.base_relations(sphere=False, torsion=True)
    F = cx.Forms(rel)
    i = F.i
    Theta = (rel.term(i, (), [("thd", (cx.AL,)), ("tau_u", (cx.BE,))])
             - rel.term(i, (), [("tau_d", (cx.AL,)), ("thu", (cx.BE,))]))
    q = rel.term(1, (), [("tau_u", ("r",)), ("tau_d", ("r",))])
    assert theta_power_closed_form(rel, 1) == Theta
    assert cx.matpow(Theta, 3) == q * F.dtheta() * (-i) * Theta
    even = (q * rel.term(1, (), [("thd", (cx.AL,)), ("thu", (cx.BE,))])
            - rel.term(i, (), [("tau_d", (cx.AL,)), ("tau_u", (cx.BE,))]) * F.dtheta())
    assert cx.matpow(Theta, 2) == even


@pytest.mark.parametrize("n", ["symbolic", 2, 3])
def test_theta_suite(n):
    _all_pass(verify_theta_powers(n, smax=3))


# generalized Kronecker ------------------------------------------------------

def test_random_tensor_symmetries():
    S, den = random_chern_like(3, np.random.default_rng(5))
    assert np.array_equal(S, S.transpose(2, 1, 0, 3))
    assert np.array_equal(S, S.transpose(0, 3, 2, 1))
    assert np.array_equal(S, np.conj(S.transpose(1, 0, 3, 2)))
    assert den > 0


def test_kronecker_pure_trace_tensor():
    n = 2
    h = np.eye(n)
    S = np.einsum("ab,cd->abcd", h, h) + np.einsum("ad,cb->abcd", h, h)
    for phi in InvariantPolynomial.all_for(n):
        assert not np.any(delta_phi_contract(S.astype(complex), phi.sigma, "extra"))


def test_kronecker_contracted_identity_loops():
    # c_Phi(S) delta_a^r = n Sym_a^b_c^d S_b^r_d^c, contracted with plain loops
    n = 2
    S, _ = random_chern_like(n, np.random.default_rng(11))
    c = delta_phi_contract(S, (0, 1), "none")
    Sym = delta_phi_contract(S, (0, 1), "first")
    rng = range(n)
    M = np.zeros((n, n), complex)
    for a in rng:
        for r in rng:
            M[a, r] = sum(Sym[a, b, c_, d] * S[b, r, d, c_] for b in rng for c_ in rng for d in rng)
    closed = sum(M[a, a] for a in rng)
    assert c != 0
    assert closed == c
    assert np.array_equal(c * np.eye(n), n * M)


def test_kronecker_suites():
    _all_pass(kronecker_vanishing_check(2, trials=5))
    assert kronecker_case(3, (0, 0, 1), 7).status == "pass"


# perturbation ---------------------------------------------------------------

def test_perturbation_traces_explicit():
    ctx = build_perturbation("symbolic")
    F, c, i = ctx.F, ctx.c, ctx.F.i
    assert cx.trace(ctx.Cdot).is_zero()
    expected = (F.dtheta() * c + F.dw() * F.dbwb() * (2 * i)) * F.dtheta() * (c ** 3 * R ** 2 * (N + N * N))
    assert cx.trace(cx.matpow(ctx.Cdot, 2)) == expected


def test_perturbation_concrete_cross_backend():
    ctx = build_perturbation("concrete", 2)
    assert ctx.ok
    G = ctx.G
    # c_Phi(Cdot) at n = 2, sigma = (0, 1): -n R^n p c^(2n) dtheta^n = -(27/4) c^4 dtheta^2
    assert char_form(InvariantPolynomial((0, 1)), ctx.Cdot_m) == G.dtheta() ** 2 * (G.c_value() ** 4 * Fraction(-27, 4))


def test_build_perturbation_errors():
    with pytest.raises(ValueError):
        build_perturbation("numeric")
    with pytest.raises(ValueError):
        build_perturbation("concrete", 1)


def test_sdot_norm():
    rel, _, Sdot, *_ = symbolic_objects()
    (coef,) = (Sdot * Sdot.conjugate()).terms.values()
    K = coef.divide_by_monomial({"c": 4}).constant_term()
    assert K == (N ** 5 + 2 * N ** 4 - 2 * N ** 2 - N) / (N + 2)
    assert K.evaluate(2) == Fraction(27, 2)


def test_symbolic_suite_small():
    _all_pass(run_symbolic_suite(kmax=3))


# variation --------------------------------------------------------------------

def test_c_phi_n_minus_1_routes():
    G = GrassmannContext(2)
    i = G.sym("i")
    Y = EndoFormMatrix.build(G, lambda a, b: G.up(a) * G.down(b) * (a + 2 * b + 1) + G.up(b) * G.down(a) * i)
    Z = EndoFormMatrix.build(G, lambda a, b: G.up(b) * (a - b) + G.down(a) * 3)
    phi = InvariantPolynomial((0, 1))
    assert c_phi_n_minus_1(phi, Y, Z, "delta") == trace(Y @ Z)
    assert c_phi_n_minus_1(phi, Y, Z, "traces") == trace(Y @ Z)
    for p in InvariantPolynomial.all_for(2):
        assert c_phi_n_minus_1(p, Y, Y) == char_form(p, Y)
    with pytest.raises(ValueError):
        c_phi_n_minus_1(phi, Y, Z, "other")


def test_variation_n2():
    res = x_phi_nth_derivative(2, (0, 1))
    assert res.ok, [(c.case_id, c.residual) for c in res.cases if not c.passed]
    assert res.f == {4: Fraction(-27, 4)}
    assert res.g == {3: Fraction(3, 4) ** 2 * 6 * Fraction(5, 3)}
    rel = res.X.rel
    c, wb = rel.sym("c"), rel.sym("wb")
    assert res.X == rel.term(c ** 3 * wb * Fraction(81, 16), [("w1", (cx.AL,))])
    assert res.divergence == rel.term(-Fraction(81, 16) * c ** 3 * (18 * c + 5))


def test_variation_vanishes_with_linear_trace():
    res = x_phi_nth_derivative(2, (2, 0))
    assert res.ok
    assert res.X.is_zero() and res.divergence.is_zero()


def test_variation_degree_mismatch():
    with pytest.raises(ValueError):
        x_phi_nth_derivative(3, (0, 1))


def test_variation_suite_n3():
    rep = run_variation_suite(((3, (0, 0, 1)),))
    _all_pass(rep)
    div = next(c for c in rep.cases if c.case_id == "divX-n3-001")
    assert div.actual == div.expected


# Reinhardt --------------------------------------------------------------------

DISPLAY = {  # frozen from an independent sympy evaluation of the closed forms
    (2, (0, 1)): (Fraction(-8, 3), Fraction(8, 9)),
    (2, (2, 0)): (Fraction(0), Fraction(0)),
    (3, (0, 0, 1)): (Fraction(-45, 4), Fraction(45, 16)),
    (4, (0, 0, 0, 1)): (Fraction(-6192, 125), Fraction(6192, 625)),
    (4, (0, 2, 0, 0)): (Fraction(864, 25), Fraction(-864, 125)),
}
TR_XI = {2: [0, Fraction(-4, 3), Fraction(-20, 9)],
         3: [0, Fraction(-5, 4), Fraction(-15, 8), Fraction(-155, 64)]}


@pytest.mark.parametrize("key", sorted(DISPLAY))
def test_reinhardt_values(key):
    n, sigma = key
    inv = reinhardt_invariants(n, sigma)
    assert inv.ok
    assert (inv.c_phi, inv.i_prime) == DISPLAY[key]
    assert c_phi_by_contraction(n, sigma) == DISPLAY[key][0]
    if n in TR_XI:
        assert [inv.tr_xi[k] for k in range(1, n + 2)] == TR_XI[n]


def test_reinhardt_suite_plain_ids():
    rep = run_reinhardt_suite((2,), (0, 1))
    _all_pass(rep)
    case = next(c for c in rep.cases if c.case_id == "tr-Xi-2")
    assert case.expected == "(-4/3)(-i dθ)^2"


def test_reinhardt_rejects_bad_sigma():
    with pytest.raises(ValueError):
        reinhardt_invariants(3, (0, 1))


def test_total_n2():
    T = total_reinhardt(2, (0, 1), 1)
    assert T["total_exact"] == "(64/9) π^4"
    assert T["matches_variant"] == "pi/((n+1)r)"
    assert T["variants"]["2pi/((n+1)r)"]["exact"] == "(512/9) π^4"
    assert abs(T["total"] - 64 * pi ** 4 / 9) <= 1e-12 * T["total"]
    assert abs(T["total_via_quadrature"] - T["total"]) <= 1e-6 * T["total"]


@pytest.mark.parametrize("r", [Fraction(1, 2), 2, 3])
def test_total_scaling(r):
    base = total_reinhardt(2, (0, 1), 1)["total"]
    assert total_reinhardt(2, (0, 1), r)["total"] == pytest.approx(base / float(r) ** 3, rel=1e-12)


def test_total_irrational_r():
    T = total_reinhardt(2, (0, 1), "0.7")
    assert T["matches_variant"] == "pi/((n+1)r)"
    assert T["total"] == pytest.approx(64 * pi ** 4 / 9 / 0.7 ** 3, rel=1e-12)


def test_total_vanishes_with_linear_trace():
    T = total_reinhardt(3, (1, 1, 0), 1)
    assert T["total"] == 0
    # both closed forms vanish too, so neither is singled out
    assert T["matches_variant"] is None


def test_totals_cases_n3():
    cases, T = totals_cases(3, (0, 0, 1))
    assert all(c.passed for c in cases)
    assert T["total_exact"] == "(135/4) π^6"


def test_total_rejects_nonpositive_r():
    with pytest.raises(ValueError):
        total_reinhardt(2, (0, 1), 0)


@pytest.mark.parametrize("n,sigma,frozen", [
    (2, (0, 1), "64*pi**4/9"),
    (3, (0, 0, 1), "135*pi**6/4"),
    (4, (0, 0, 0, 1), "396288*pi**7/625"),
    (4, (0, 2, 0, 0), "-55296*pi**7/125"),
])
def test_totals_against_sympy(n, sigma, frozen):
    sp = pytest.importorskip("sympy")
    vol_sphere = 2 * sp.pi ** sp.Rational(n + 1, 2) / sp.gamma(sp.Rational(n + 1, 2))
    vol = sp.factorial(n) * sp.pi ** (n + 1) * vol_sphere
    ip = reinhardt_invariants(n, sigma).i_prime
    total = sp.nsimplify(sp.Rational(ip.numerator, ip.denominator) * vol)
    assert sp.simplify(total - sp.sympify(frozen)) == 0
    T = total_reinhardt(n, sigma, 1, resolution=16)
    assert T["total"] == pytest.approx(float(total), rel=1e-12)
    two_pi = T["variants"]["2pi/((n+1)r)"]["value"]
    assert two_pi == pytest.approx(2 ** (n + 1) * float(total), rel=1e-12)
