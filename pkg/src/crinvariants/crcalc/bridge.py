"""Specialize symbolic-n tensor expressions to concrete Grassmann forms."""
from __future__ import annotations

from itertools import product
from typing import Callable, Mapping

from ..exterior import EndoFormMatrix, Form, GrassmannContext
from ..symkernel import ScalarExpr
from ..tensorlang import DELTA, TensorExpr
from .context import AL, BE


class Bridge:
    """Maps atoms to concrete components: w_a -> a_k, conj(w)^a -> b_k, h -> identity.

    ``oneforms`` may override or extend the one-form atoms (for instance tau),
    each entry a callable ``index -> Form``.
    """

    def __init__(self, G: GrassmannContext, oneforms: Mapping[str, Callable] | None = None,
                 scalars: Mapping[str, ScalarExpr] | None = None):
        self.G = G
        self.oneforms = {
            "thu": G.up,
            "thd": G.down,
            "th": lambda: G.theta(),
        }
        if oneforms:
            self.oneforms.update(oneforms)
        self.scalar_atoms = {"w1": G.a, "wb1": G.b}
        self.symbols = {"c": G.c_value(), "w": G.sym("w"), "wb": G.sym("wb"), "i": G.sym("i")}
        if scalars:
            self.symbols.update(scalars)
        self._cache: dict = {}

    def coefficient(self, c: ScalarExpr) -> ScalarExpr:
        hit = self._cache.get(c)
        if hit is not None:
            return hit
        n0 = self.G.n
        tot = ScalarExpr.const(self.G.table, 0)
        names = c.table.names
        for mono, coef in c.terms.items():
            term = ScalarExpr.const(self.G.table, coef.evaluate(n0))
            for k, e in enumerate(mono):
                if e:
                    if names[k] not in self.symbols:
                        raise KeyError(f"no concrete value for symbol {names[k]!r}")
                    term = term * self.symbols[names[k]] ** e
            tot = tot + term
        self._cache[c] = tot
        return tot

    def _term_form(self, scalars, word, env) -> Form | None:
        G = self.G
        s = ScalarExpr.const(G.table, 1)
        for name, labels in scalars:
            idx = [env[l] for l in labels]
            if name == DELTA:
                if idx[0] != idx[1]:
                    return None
                continue
            s = s * self.scalar_atoms[name](*idx)
        f = Form.scalar(G, s)
        for name, labels in word:
            f = f * self.oneforms[name](*[env[l] for l in labels])
            if f.is_zero():
                return None
        return f

    def form(self, e: TensorExpr, fixed: Mapping[str, int] | None = None) -> Form:
        """Concrete form for an expression whose free labels are all in ``fixed``."""
        fixed = dict(fixed or {})
        missing = [l for l, _ in e.free if l not in fixed]
        if missing:
            raise ValueError(f"free labels {missing} need values")
        G = self.G
        tot = G.zero()
        ngen = 2 * G.n + 1
        for (s, w), c in e.terms.items():
            if sum(e.rel.atoms.defs[name].grade for name, _ in w) > ngen:
                continue  # more one-forms than generators
            cc = self.coefficient(c)
            dummies = sorted({l for _, labels in list(s) + list(w) for l in labels if isinstance(l, int)})
            acc = G.zero()
            for vals in product(range(G.n), repeat=len(dummies)):
                env = dict(fixed)
                env.update(zip(dummies, vals))
                f = self._term_form(s, w, env)
                if f is not None:
                    acc = acc + f
            tot = tot + acc * cc
        return tot

    def matrix(self, e: TensorExpr, left: str = AL, right: str = BE) -> EndoFormMatrix:
        return EndoFormMatrix.build(self.G, lambda a, b: self.form(e, {left: a, right: b}))
