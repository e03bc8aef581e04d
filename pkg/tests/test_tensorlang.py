from itertools import permutations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from crinvariants.crcalc.context import AL, BE, base_relations
from crinvariants.crcalc.perturbation import symbolic_objects
from crinvariants.hypersurface_num import tf4_numeric
from crinvariants.symkernel import DimRational
from crinvariants.tensorlang import (ANTI, HOL, TensorExpr, component_values, contract_canonicalize,
                                     derive, gen_kronecker_expand, tf3, tf4)

N = DimRational.n()
REL = base_relations()


def W(lab):
    return REL.atom("w1", lab)


def WB(lab):
    return REL.atom("wb1", lab)


def D(lo, up):
    return REL.delta(lo, up)


# building blocks with signature (al d, be u, ga d, si u)
FOUR = [
    lambda: W(AL) * WB(BE) * W("ga") * WB("si"),
    lambda: W(AL) * WB(BE) * D("ga", "si"),
    lambda: W("ga") * WB(BE) * D(AL, "si"),
    lambda: W(AL) * WB("si") * D("ga", BE),
    lambda: D(AL, BE) * D("ga", "si"),
    lambda: D(AL, "si") * D("ga", BE),
    lambda: W(AL) * W("ga") * WB(BE) * WB("si") * REL.term(REL.sym("c")),
]
THREE = [
    lambda: W(AL) * WB(BE) * W("ga"),
    lambda: W(AL) * D("ga", BE),
    lambda: W("ga") * D(AL, BE),
]

coeffs = st.integers(-3, 3)


@st.composite
def four_tensors(draw):
    ks = draw(st.lists(coeffs, min_size=len(FOUR), max_size=len(FOUR)).filter(any))
    return sum((f() * k for f, k in zip(FOUR, ks) if k), REL.zero([(AL, "d"), (BE, "u"), ("ga", "d"), ("si", "u")]))


@st.composite
def three_tensors(draw):
    ks = draw(st.lists(coeffs, min_size=len(THREE), max_size=len(THREE)).filter(any))
    return sum((f() * k for f, k in zip(THREE, ks) if k), REL.zero([(AL, "d"), (BE, "u"), ("ga", "d")]))


def test_dimension_trace():
    assert REL.delta("g", "g") == REL.term(N)


def test_w_wbar_pair():
    assert REL.term(1, [("w1", ("g",)), ("wb1", ("g",))]) == REL.term(-(N + 1) * REL.sym("c"))


def test_generalized_delta_trace():
    assert gen_kronecker_expand(REL, 2, ["g", AL], ["g", BE]) == D(AL, BE) * (N - 1)


def test_generalized_delta_small():
    assert gen_kronecker_expand(REL, 1) == D("a1", "b1")
    assert gen_kronecker_expand(REL, 2) == D("a1", "b1") * D("a2", "b2") - D("a1", "b2") * D("a2", "b1")
    assert len(gen_kronecker_expand(REL, 3)) == 6


@pytest.mark.parametrize("k", [2, 3, 4])
def test_generalized_delta_antisymmetric(k):
    e = gen_kronecker_expand(REL, k)
    for j in range(k - 1):
        for grp in "ab":
            x, y = f"{grp}{j + 1}", f"{grp}{j + 2}"
            assert e.relabel({x: y, y: x}) == -e
    x, y = "a1", f"a{k}"
    assert e.relabel({x: y, y: x}) == -e


def test_full_trace_of_generalized_delta():
    # delta^{b1 b2 b3}_{a1 a2 a3} fully traced is n(n-1)(n-2)
    e = gen_kronecker_expand(REL, 3, ["x", "y", "z"], ["x", "y", "z"])
    assert e == REL.term(N * (N - 1) * (N - 2))


def test_tf4_pure_trace():
    assert tf4(D(AL, BE) * D("ga", "si") + D(AL, "si") * D("ga", BE)).is_zero()


def test_tf4_matches_perturbation():
    _, _, Sdot, *_ = symbolic_objects(REL)
    assert tf4(W(AL) * WB(BE) * W("ga") * WB("si")) == Sdot


def test_tf3_pure_trace():
    assert tf3(W(AL) * D("ga", BE) + W("ga") * D(AL, BE)).is_zero()


def test_tf_rejects_wrong_signature():
    with pytest.raises(ValueError):
        tf4(W(AL) * WB(BE))


@given(four_tensors())
def test_tf4_trace_free_and_idempotent(T):
    S = tf4(T)
    for a, b in ((AL, BE), (AL, "si"), ("ga", BE), ("ga", "si")):
        assert S.contract(a, b).is_zero()
    assert tf4(S) == S


@given(three_tensors())
def test_tf3_trace_free_and_idempotent(T):
    V = tf3(T)
    assert V.contract(AL, BE).is_zero()
    assert V.contract("ga", BE).is_zero()
    assert tf3(V) == V


@pytest.mark.parametrize("n0", [2, 3])
@given(T=four_tensors(), seed=st.integers(0, 10 ** 6))
def test_tf4_component_oracle(n0, T, seed):
    rng = np.random.default_rng(seed)
    w = rng.normal(size=n0) + 1j * rng.normal(size=n0)
    c = -np.vdot(w, w).real / (n0 + 1)
    atoms = {"w1": lambda a: w[a], "wb1": lambda b: np.conj(w[b])}
    syms = {"c": c}
    comp = component_values(T, n0, atoms, syms, order=[AL, BE, "ga", "si"])
    raw = np.zeros((n0,) * 4, complex)
    for k, v in comp.items():
        raw[k] = v
    sym = component_values(tf4(T), n0, atoms, syms, order=[AL, BE, "ga", "si"])
    num = tf4_numeric(raw, np.eye(n0))
    for k, v in sym.items():
        assert abs(complex(v) - num[k]) <= 1e-9 * (1 + np.max(np.abs(num)))


def test_derivative_rules():
    c, w, wb = REL.sym("c"), REL.sym("w"), REL.sym("wb")
    assert derive(REL.term(c), HOL, AL) == W(AL) * (wb / (N + 1))
    assert derive(W(AL), ANTI, BE) == D(AL, BE) * (-w)
    assert derive(REL.term(wb), HOL, AL).is_zero()
    # gradient of c^(2n) at n = 2
    grad = derive(REL.term(c ** 4), HOL, AL).map_coefficients(lambda s: s.specialize_n(2))
    assert grad == W(AL) * (c ** 3 * wb * DimRational.const(4) / 3)


def test_derive_needs_rules():
    rel = base_relations(sphere=False)
    with pytest.raises(KeyError):
        derive(rel.term(rel.sym("c")), HOL, AL)


def test_sign_law_fixed():
    a = REL.term(1, (), [("thu", (AL,)), ("thd", (BE,))])
    b = REL.term(1, (), [("thd", (BE,)), ("thu", (AL,))])
    assert a == -b


ONEFORMS = ["thu", "thd", "tau_u", "tau_d"]


@given(st.lists(st.sampled_from(ONEFORMS), min_size=2, max_size=5), st.data())
def test_sign_law_random(names, data):
    labels = [f"x{j}" for j in range(len(names))]
    word = [(nm, (lab,)) for nm, lab in zip(names, labels)]
    k = data.draw(st.integers(0, len(word) - 2))
    swapped = list(word)
    swapped[k], swapped[k + 1] = swapped[k + 1], swapped[k]
    assert REL.term(1, (), word) == -REL.term(1, (), swapped)


def _raw_terms(rel, d1, d2):
    return [
        (rel.scalar(2), [("w1", (d1,)), ("wb1", (d2,)), ("w1", (AL,))], [("thu", (d1,)), ("thd", (d2,))]),
        (rel.scalar(-1), [("w1", (d2,)), ("wb1", (d1,)), ("w1", (AL,))], [("thd", (d1,)), ("thu", (d2,))]),
        (rel.sym("c") * 3, [("w1", (AL,))], [("tau_u", (d1,)), ("thd", (d1,))]),
        (rel.scalar(5), [("w1", (d1,)), ("wb1", (d1,))], [("tau_d", (AL,)), ("thd", (d2,)), ("thu", (d2,))]),
    ]


@given(st.permutations(range(4)), st.sampled_from([("p", "q"), ("q", "p"), ("m1", "zz")]))
def test_canonical_form_order_and_dummy_independent(order, dummies):
    rel = base_relations(sphere=False)
    ref = TensorExpr.from_raw(rel, _raw_terms(rel, "g", "h"))
    raw = _raw_terms(rel, *dummies)
    e = TensorExpr.from_raw(rel, [raw[k] for k in order])
    assert e == ref
    assert contract_canonicalize(e) == e


@given(st.permutations(range(4)))
def test_rule_order_confluence(order):
    # the same product formed in different orders meets the pair rule at different stages
    factors = [W("g"), WB("g"), W(AL), REL.term(REL.sym("w") * REL.sym("wb"))]
    whole = REL.term(1, [("w1", ("g",)), ("wb1", ("g",)), ("w1", (AL,))]) * REL.term(REL.sym("w") * REL.sym("wb"))
    prod = REL.one()
    for k in order:
        prod = prod * factors[k]
    assert prod == whole
    assert whole == W(AL) * (-(N + 1) * REL.sym("c") * (1 + (N + 1) * REL.sym("c")))


def test_isomorphic_odd_components_vanish():
    # theta^g theta_g wedge theta^h theta_h survives; tau^a theta_a twice does not (pair rule aside)
    rel = base_relations(sphere=False, torsion=False)
    dth = rel.term(1, (), [("thu", ("g",)), ("thd", ("g",))])
    assert not (dth * dth).is_zero()
    one = rel.term(1, (), [("th", ())])
    assert (one * one).is_zero()


def test_conjugation_roundtrip():
    e = W(AL) * WB(BE) * REL.term(REL.sym("i") * REL.sym("w"))
    assert e.conjugate().conjugate() == e


def test_free_index_mismatch():
    with pytest.raises(ValueError):
        W(AL) + WB(BE)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_generalized_delta_component_oracle(k):
    e = gen_kronecker_expand(REL, k)
    order = [f"a{j}" for j in range(1, k + 1)] + [f"b{j}" for j in range(1, k + 1)]
    comp = component_values(e, 3, {}, {}, order)
    for idx, v in comp.items():
        lo, up = idx[:k], idx[k:]
        want = 0
        for p in permutations(range(k)):
            if all(lo[j] == up[p[j]] for j in range(k)):
                sign = 1
                for x in range(k):
                    for y in range(x + 1, k):
                        if p[x] > p[y]:
                            sign = -sign
                want += sign
        assert v == want
