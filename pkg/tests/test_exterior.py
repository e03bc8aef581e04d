from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from crinvariants.crcalc.reinhardt import sigma_and_l, xi_from_chern
from crinvariants.exterior import (EndoFormMatrix, Form, GrassmannContext, InvariantPolynomial, char_form,
                                   mat_power, polarized, top_form_coefficient, trace, wedge)

G2 = GrassmannContext(2)
G3 = GrassmannContext(3)


@st.composite
def forms(draw, G=G2, grade=None):
    g = draw(st.integers(0, 3)) if grade is None else grade
    masks = [sum(1 << b for b in c) for c in combinations(range(G.ngen), g)]
    chosen = draw(st.lists(st.sampled_from(masks), min_size=1, max_size=3, unique=True))
    i = G.sym("i")
    terms = {}
    for m in chosen:
        re, im = draw(st.integers(-3, 3)), draw(st.integers(-3, 3))
        terms[m] = G.scalar(re) + i * im
    return Form(G, terms)


@st.composite
def matrices(draw, G=G2, grade=None):
    g = draw(st.integers(0, 2)) if grade is None else grade
    return EndoFormMatrix(G, [[draw(forms(G, g)) for _ in range(G.n)] for _ in range(G.n)])


def test_theta_squares_to_zero():
    assert (G2.theta() * G2.theta()).is_zero()
    assert G2.up(0) * G2.up(1) == -(G2.up(1) * G2.up(0))


def test_dtheta_cubed_vanishes_at_n2():
    assert not (G2.dtheta() ** 2).is_zero()
    assert (G2.dtheta() ** 3).is_zero()


@pytest.mark.parametrize("G", [G2, G3])
def test_sigma_l_table(G):
    n = G.n
    i = G.sym("i")
    dth = G.dtheta()
    Sig, L = sigma_and_l(G)
    assert Sig @ Sig == Sig.wedge_form(dth * (-i / Fraction(n + 1)), left=True)
    assert L @ L == L.wedge_form(dth * (-i), left=True)
    assert trace(Sig) == dth * (-i)
    assert trace(L) == dth * i
    assert trace(xi_from_chern(G)).is_zero()


def test_identity_power():
    I = EndoFormMatrix.identity(G2)
    assert mat_power(I, 5) == I


def test_char_form_reinhardt_n2():
    i = G2.sym("i")
    Xi = xi_from_chern(G2)
    top = char_form(InvariantPolynomial((0, 1)), Xi.scale(i))
    # (1/n!) c_Phi(S) dtheta^n with c_Phi(S) = -8/3
    assert top == G2.dtheta() ** 2 * Fraction(-4, 3)
    assert top_form_coefficient(top, G2.dtheta() ** 2) == Fraction(-4, 3)


def test_char_form_degree_check():
    with pytest.raises(ValueError):
        char_form(InvariantPolynomial((0, 1)), xi_from_chern(G2), degree=3)


def test_invariant_polynomials():
    assert [p.sigma for p in InvariantPolynomial.all_for(2)] == [(0, 1), (2, 0)]
    assert len(InvariantPolynomial.all_for(3)) == 3
    assert len(InvariantPolynomial.all_for(4)) == 5
    assert sum(p.class_size() for p in InvariantPolynomial.all_for(4)) == 24
    with pytest.raises(ValueError):
        InvariantPolynomial((1, 1))
    with pytest.raises(ValueError):
        InvariantPolynomial((0, -1))


@given(forms(), forms(), forms())
def test_graded_algebra(a, b, c):
    assert wedge(wedge(a, b), c) == wedge(a, wedge(b, c))
    sign = -1 if a.grade() * b.grade() % 2 else 1
    assert wedge(a, b) == wedge(b, a) * sign
    assert wedge(a, b + c) == wedge(a, b) + wedge(a, c)


@given(matrices(grade=1), matrices(grade=2))
def test_cyclic_trace(A, B):
    sign = -1 if A.grade() * B.grade() % 2 else 1
    assert trace(A @ B) == trace(B @ A) * sign


@given(matrices(grade=0))
def test_trace_free_zero_forms(M):
    # remove the diagonal average
    n = M.ctx.n
    t = trace(M) * Fraction(1, n)
    M0 = M - EndoFormMatrix.build(M.ctx, lambda a, b: t if a == b else M.ctx.zero())
    assert trace(M0).is_zero()


@given(matrices(grade=2))
def test_char_form_definitions(M):
    assert char_form(InvariantPolynomial((0, 1)), M) == trace(M @ M)
    assert char_form(InvariantPolynomial((2, 0)), M) == trace(M) * trace(M)


@given(matrices(grade=2))
def test_polarized_matches_char_form(M):
    for phi in InvariantPolynomial.all_for(2):
        assert polarized(phi, [M, M]) == char_form(phi, M)


def test_polarized_matches_char_form_n3():
    Xi = xi_from_chern(G3)
    for phi in InvariantPolynomial.all_for(3):
        assert polarized(phi, [Xi] * 3) == char_form(phi, Xi)


def test_mixed_grades_rejected():
    with pytest.raises(ValueError):
        EndoFormMatrix(G2, [[G2.one(), G2.up(0)], [G2.zero(), G2.zero()]])


def test_contexts_do_not_mix():
    with pytest.raises(ValueError):
        wedge(G2.theta(), G3.theta())
