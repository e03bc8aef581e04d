"""Atom and rule tables for the sphere perturbation and the torsion identities."""
from __future__ import annotations

from fractions import Fraction

from ..symkernel import DimRational, ScalarExpr, SymbolTable
from ..tensorlang import (ANTI, DOWN, HOL, UP, AtomDef, AtomTable, RelationTable,
                          TensorExpr)

SYMBOLS = ("c", "w", "wb", "t", "i")

# al: free hol-down index, be: free hol-up index (endomorphism slots)
AL, BE = "al", "be"


def _atoms() -> AtomTable:
    at = AtomTable()
    at.register(AtomDef("w1", ((HOL, DOWN),), 0, (), "wb1"))       # w_a
    at.register(AtomDef("wb1", ((ANTI, DOWN),), 0, (), "w1"))      # conj(w)_{b-bar}, same as conj(w)^b
    at.register(AtomDef("thu", ((HOL, UP),), 1, (), "thd"))        # theta^a
    at.register(AtomDef("thd", ((HOL, DOWN),), 1, (), "thu"))      # theta_a = h_{a b-bar} theta^{b-bar}
    at.register(AtomDef("th", (), 1, (), "th"))                    # contact form
    at.register(AtomDef("tau_u", ((HOL, UP),), 1, (), "tau_d"))    # tau^a
    at.register(AtomDef("tau_d", ((HOL, DOWN),), 1, (), "tau_u"))  # tau_a
    at.check_conjugation()
    return at


def base_relations(sphere: bool = True, torsion: bool = True, rewrite: bool = True) -> RelationTable:
    """Relation table over the symbols c, w, wb, t.

    ``sphere`` registers the round-sphere data: w_g conj(w)^g = -(n+1)c and the
    covariant derivatives of w, conj(w), c.  ``torsion`` registers
    theta^g tau_g = 0 and its conjugate.  ``rewrite`` turns w*wb into 1+(n+1)c.
    """
    table = SymbolTable(SYMBOLS)
    rel = RelationTable(table, _atoms())
    n = DimRational.n()
    rel.scalar_conjugation.update({"w": "wb", "wb": "w", "c": "c", "t": "t"})
    rel.constant_symbols.add("t")
    c, w, wb = rel.sym("c"), rel.sym("w"), rel.sym("wb")
    if sphere:
        rel.add_pair_rule("w1", "wb1", -(n + 1) * c)
        if rewrite:
            rel.add_scalar_rewrite({"w": 1, "wb": 1}, 1 + (n + 1) * c)
        zero_d = rel.zero([("_d", "d")])
        zero_u = rel.zero([("_d", "u")])
        rel.add_derivative_rule("w1", HOL, rel.zero([("_0", "d"), ("_d", "d")]))
        rel.add_derivative_rule("wb1", HOL, rel.delta("_d", "_0") * (-wb))
        rel.add_derivative_rule("w1", ANTI, rel.delta("_0", "_d") * (-w))
        rel.add_derivative_rule("wb1", ANTI, rel.zero([("_0", "u"), ("_d", "u")]))
        rel.add_scalar_derivative_rule("w", HOL, rel.atom("w1", "_d"))
        rel.add_scalar_derivative_rule("w", ANTI, zero_u)
        rel.add_scalar_derivative_rule("wb", HOL, zero_d)
        rel.add_scalar_derivative_rule("wb", ANTI, rel.atom("wb1", "_d"))
        rel.add_scalar_derivative_rule("c", HOL, rel.atom("w1", "_d") * (wb / (n + 1)))
        rel.add_scalar_derivative_rule("c", ANTI, rel.atom("wb1", "_d") * (w / (n + 1)))
    if torsion:
        rel.add_pair_rule("thu", "tau_d", 0)
        rel.add_pair_rule("tau_u", "thd", 0)
    i = rel.sym("i")
    rel.display_pairs[("thu", "thd")] = ("dθ", -i)
    rel.display_pairs[("thd", "thu")] = ("dθ", i)
    rel.display_mixed[("w1", "thu")] = "∂w"
    rel.display_mixed[("wb1", "thd")] = "∂̄w̄"
    return rel


class Forms:
    """Frequently used forms and endomorphism-valued forms in a relation table."""

    def __init__(self, rel: RelationTable):
        self.rel = rel
        self.i = rel.sym("i")
        self.c = rel.sym("c")
        self.w = rel.sym("w")
        self.wb = rel.sym("wb")

    def dtheta(self) -> TensorExpr:
        return self.rel.term(self.i, (), [("thu", ("g",)), ("thd", ("g",))])

    def dw(self) -> TensorExpr:
        return self.rel.term(1, [("w1", ("g",))], [("thu", ("g",))])

    def dbwb(self) -> TensorExpr:
        return self.rel.term(1, [("wb1", ("g",))], [("thd", ("g",))])

    def ident(self) -> TensorExpr:
        return self.rel.delta(AL, BE)


def matmul(A: TensorExpr, B: TensorExpr, left: str = AL, right: str = BE) -> TensorExpr:
    """(AB)_a^b = A_a^g B_g^b for endomorphism-valued forms."""
    mid = "__mid__"
    return A.relabel({right: mid}) * B.relabel({left: mid})


def matpow(A: TensorExpr, k: int) -> TensorExpr:
    if k < 1:
        raise ValueError("k must be positive")
    out = A
    for _ in range(k - 1):
        out = matmul(out, A)
    return out


def trace(A: TensorExpr) -> TensorExpr:
    return A.contract(AL, BE)


def power(e: TensorExpr, k: int) -> TensorExpr:
    if k < 0:
        return e.rel.zero()
    return e ** k


def frac(p, q=1) -> Fraction:
    return Fraction(p, q)


def scalar(rel: RelationTable, value) -> ScalarExpr:
    return rel.scalar(value)
