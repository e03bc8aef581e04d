"""Grassmann algebra on the coframe {theta, theta^1..theta^n, theta_1..theta_n}.

Coefficients are ``ScalarExpr`` over a per-dimension symbol table holding the
components a_k of w_a, b_k of conj(w)^a, the functions w, wb, the display-only
symbol c, any caller-supplied extras, and the imaginary unit.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import permutations
from math import factorial
from typing import Callable, Iterable, Sequence

from .symkernel import DimRational, ScalarExpr, SymbolTable


class InvariantPolynomial:
    """Phi(varsigma): the product of (tr A^k)^{varsigma_k}, homogeneous of degree sum k*varsigma_k."""

    def __init__(self, sigma: Iterable[int]):
        sigma = tuple(int(s) for s in sigma)
        if not sigma or any(s < 0 for s in sigma):
            raise ValueError("exponents must be nonnegative and not all absent")
        degree = sum((k + 1) * s for k, s in enumerate(sigma))
        if degree != len(sigma):
            raise ValueError(f"sum k*sigma_k = {degree} must equal the length {len(sigma)}")
        self.sigma = sigma
        self.degree = degree

    @classmethod
    def all_for(cls, n: int) -> list["InvariantPolynomial"]:
        out = []

        def rec(k, remaining, acc):
            if k > n:
                if remaining == 0:
                    out.append(cls(acc))
                return
            for s in range(remaining // k + 1):
                rec(k + 1, remaining - k * s, acc + [s])

        rec(1, n, [])
        return out

    def cycle_type(self) -> list[int]:
        """Cycle lengths of a representative permutation, longest first."""
        lengths = []
        for k in range(len(self.sigma), 0, -1):
            lengths += [k] * self.sigma[k - 1]
        return lengths

    def class_size(self) -> int:
        denom = 1
        for k, s in enumerate(self.sigma, start=1):
            denom *= k ** s * factorial(s)
        return factorial(self.degree) // denom

    def __eq__(self, other):
        return isinstance(other, InvariantPolynomial) and self.sigma == other.sigma

    def __hash__(self):
        return hash(self.sigma)

    def __repr__(self):
        return f"Phi{self.sigma}"


def _cycle_type_of(perm: Sequence[int]) -> tuple:
    seen = [False] * len(perm)
    counts = [0] * len(perm)
    for i in range(len(perm)):
        if not seen[i]:
            L = 0
            j = i
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                L += 1
            counts[L - 1] += 1
    return tuple(counts)


class GrassmannContext:
    """Generators and coefficient ring for one concrete dimension n."""

    def __init__(self, n: int, extra_symbols: Sequence[str] = ()):
        if n < 1:
            raise ValueError("n must be positive")
        self.n = n
        names = [f"a{k}" for k in range(1, n + 1)] + [f"b{k}" for k in range(1, n + 1)]
        names += ["w", "wb", "c"] + list(extra_symbols) + ["i"]
        self.table = SymbolTable(names)
        self.ngen = 2 * n + 1

    # generator bits: 0 -> theta, 1..n -> theta^a, n+1..2n -> theta_a (a is 0-based)
    def bit_theta(self) -> int:
        return 0

    def bit_up(self, a: int) -> int:
        return 1 + a

    def bit_down(self, a: int) -> int:
        return 1 + self.n + a

    def gen_name(self, bit: int) -> str:
        if bit == 0:
            return "θ"
        if bit <= self.n:
            return f"θ^{bit}"
        return f"θ_{bit - self.n}"

    # scalars ----------------------------------------------------------
    def sym(self, name: str, power: int = 1) -> ScalarExpr:
        return ScalarExpr.symbol(self.table, name, power)

    def scalar(self, v) -> ScalarExpr:
        return v if isinstance(v, ScalarExpr) else ScalarExpr.const(self.table, v)

    def a(self, k: int) -> ScalarExpr:
        return self.sym(f"a{k + 1}")

    def b(self, k: int) -> ScalarExpr:
        return self.sym(f"b{k + 1}")

    def c_value(self) -> ScalarExpr:
        """c = -(1/(n+1)) sum_k a_k b_k."""
        tot = ScalarExpr.const(self.table, 0)
        for k in range(self.n):
            tot = tot + self.a(k) * self.b(k)
        return tot * Fraction(-1, self.n + 1)

    def c_relations(self) -> dict:
        """Substitutions realizing c and the relation w*wb = 1+(n+1)c."""
        return {"c": self.c_value()}

    # forms ------------------------------------------------------------
    def zero(self) -> "Form":
        return Form(self, {})

    def one(self) -> "Form":
        return Form.scalar(self, 1)

    def gen(self, bit: int) -> "Form":
        return Form(self, {1 << bit: ScalarExpr.const(self.table, 1)})

    def theta(self) -> "Form":
        return self.gen(0)

    def up(self, a: int) -> "Form":
        return self.gen(self.bit_up(a))

    def down(self, a: int) -> "Form":
        return self.gen(self.bit_down(a))

    def dtheta(self) -> "Form":
        i = self.sym("i")
        out = self.zero()
        for g in range(self.n):
            out = out + (self.up(g) * self.down(g)) * i
        return out

    def dw(self) -> "Form":
        out = self.zero()
        for g in range(self.n):
            out = out + self.up(g) * self.a(g)
        return out

    def dbwb(self) -> "Form":
        out = self.zero()
        for g in range(self.n):
            out = out + self.down(g) * self.b(g)
        return out


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _wedge_sign(m1: int, m2: int) -> int:
    # sign of reordering (gens of m1)(gens of m2) into increasing bit order
    s = 0
    m = m2
    while m:
        low = m & -m
        s += _popcount(m1 & ~((low << 1) - 1))
        m ^= low
    return -1 if s & 1 else 1


class Form:
    """Sparse element of the exterior algebra: {bitmask: coefficient}."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: GrassmannContext, terms: dict):
        self.ctx = ctx
        self.terms = {m: c for m, c in terms.items() if not c.is_zero()}

    @classmethod
    def scalar(cls, ctx: GrassmannContext, v) -> "Form":
        return cls(ctx, {0: ctx.scalar(v)})

    def _coerce(self, other) -> "Form":
        if isinstance(other, Form):
            if other.ctx is not self.ctx:
                raise ValueError("forms from different generator contexts")
            return other
        return Form.scalar(self.ctx, other)

    def grades(self) -> set[int]:
        return {_popcount(m) for m in self.terms}

    def grade(self) -> int:
        g = self.grades()
        if len(g) > 1:
            raise ValueError("form is not homogeneous")
        return g.pop() if g else 0

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            prev = out.get(m)
            out[m] = c if prev is None else prev + c
        return Form(self.ctx, out)

    __radd__ = __add__

    def __neg__(self):
        return Form(self.ctx, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        """Scalars scale; forms wedge."""
        if not isinstance(other, Form):
            if isinstance(other, (int, Fraction, DimRational, ScalarExpr)):
                s = self.ctx.scalar(other) if not isinstance(other, DimRational) else other
                return Form(self.ctx, {m: c * s for m, c in self.terms.items()})
            return NotImplemented
        return wedge(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, DimRational, ScalarExpr)):
            return self * other
        return NotImplemented

    def __pow__(self, k: int):
        out = self.ctx.one()
        for _ in range(k):
            out = wedge(out, self)
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Form.scalar(self.ctx, other)
        if not isinstance(other, Form):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def map_coefficients(self, fn: Callable[[ScalarExpr], ScalarExpr]) -> "Form":
        return Form(self.ctx, {m: fn(c) for m, c in self.terms.items()})

    def substitute(self, rules) -> "Form":
        return self.map_coefficients(lambda c: c.substitute(rules))

    def coefficient(self, mask: int) -> ScalarExpr:
        return self.terms.get(mask, ScalarExpr.const(self.ctx.table, 0))

    def ratio_to(self, other: "Form") -> ScalarExpr | None:
        """Scalar q with self == q*other if other has a constant-coefficient term to divide by."""
        if other.is_zero():
            return None if not self.is_zero() else ScalarExpr.const(self.ctx.table, 0)
        for m, c in other.terms.items():
            if c.is_constant():
                q = self.coefficient(m) / c.constant_term()
                return q if other * q == self else None
        raise ValueError("reference form needs a term with a constant coefficient")

    def __repr__(self):
        return f"Form({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms):
            gens = [self.ctx.gen_name(b) for b in range(self.ctx.ngen) if m >> b & 1]
            parts.append(f"({self.terms[m]})" + ("" if not gens else " " + "∧".join(gens)))
        return " + ".join(parts)


def wedge(a: Form, b: Form) -> Form:
    if a.ctx is not b.ctx:
        raise ValueError("forms from different generator contexts")
    out: dict = {}
    for m1, c1 in a.terms.items():
        for m2, c2 in b.terms.items():
            if m1 & m2:
                continue
            c = c1 * c2
            if _wedge_sign(m1, m2) < 0:
                c = -c
            m = m1 | m2
            prev = out.get(m)
            out[m] = c if prev is None else prev + c
    return Form(a.ctx, out)


class EndoFormMatrix:
    """n x n matrix of forms; row = lower index, column = upper index."""

    __slots__ = ("ctx", "rows")

    def __init__(self, ctx: GrassmannContext, rows: Sequence[Sequence[Form]]):
        n = ctx.n
        if len(rows) != n or any(len(r) != n for r in rows):
            raise ValueError(f"expected a {n}x{n} matrix")
        self.ctx = ctx
        self.rows = [list(r) for r in rows]
        grades = set()
        for r in self.rows:
            for f in r:
                grades |= f.grades()
        if len(grades) > 1:
            raise ValueError(f"entries have mixed grades {sorted(grades)}")

    @classmethod
    def build(cls, ctx: GrassmannContext, entry: Callable[[int, int], Form]) -> "EndoFormMatrix":
        return cls(ctx, [[entry(a, b) for b in range(ctx.n)] for a in range(ctx.n)])

    @classmethod
    def identity(cls, ctx: GrassmannContext) -> "EndoFormMatrix":
        return cls.build(ctx, lambda a, b: ctx.one() if a == b else ctx.zero())

    def grade(self) -> int:
        for r in self.rows:
            for f in r:
                if not f.is_zero():
                    return f.grade()
        return 0

    def __getitem__(self, ab):
        a, b = ab
        return self.rows[a][b]

    def __add__(self, other: "EndoFormMatrix"):
        return EndoFormMatrix.build(self.ctx, lambda a, b: self.rows[a][b] + other.rows[a][b])

    def __sub__(self, other: "EndoFormMatrix"):
        return EndoFormMatrix.build(self.ctx, lambda a, b: self.rows[a][b] - other.rows[a][b])

    def __neg__(self):
        return EndoFormMatrix.build(self.ctx, lambda a, b: -self.rows[a][b])

    def scale(self, s) -> "EndoFormMatrix":
        return EndoFormMatrix.build(self.ctx, lambda a, b: self.rows[a][b] * s)

    def wedge_form(self, f: Form, left: bool = False) -> "EndoFormMatrix":
        if left:
            return EndoFormMatrix.build(self.ctx, lambda a, b: f * self.rows[a][b])
        return EndoFormMatrix.build(self.ctx, lambda a, b: self.rows[a][b] * f)

    def __matmul__(self, other: "EndoFormMatrix") -> "EndoFormMatrix":
        return mat_mul(self, other)

    def map_coefficients(self, fn) -> "EndoFormMatrix":
        return EndoFormMatrix.build(self.ctx, lambda a, b: self.rows[a][b].map_coefficients(fn))

    def __eq__(self, other):
        if not isinstance(other, EndoFormMatrix):
            return NotImplemented
        return all(self.rows[a][b] == other.rows[a][b] for a in range(self.ctx.n) for b in range(self.ctx.n))

    def __hash__(self):
        return hash(tuple(hash(f) for r in self.rows for f in r))

    def is_zero(self) -> bool:
        return all(f.is_zero() for r in self.rows for f in r)

    def __str__(self):
        return "\n".join(" | ".join(str(f) for f in r) for r in self.rows)


def mat_mul(A: EndoFormMatrix, B: EndoFormMatrix) -> EndoFormMatrix:
    if A.ctx is not B.ctx:
        raise ValueError("dimension mismatch: different contexts")
    n = A.ctx.n

    def entry(a, b):
        tot = A.ctx.zero()
        for g in range(n):
            if A.rows[a][g].terms and B.rows[g][b].terms:
                tot = tot + wedge(A.rows[a][g], B.rows[g][b])
        return tot

    return EndoFormMatrix.build(A.ctx, entry)


def mat_power(M: EndoFormMatrix, k: int) -> EndoFormMatrix:
    if k < 1:
        raise ValueError("k must be positive")
    out = M
    for _ in range(k - 1):
        out = mat_mul(out, M)
    return out


def trace(M: EndoFormMatrix) -> Form:
    tot = M.ctx.zero()
    for a in range(M.ctx.n):
        tot = tot + M.rows[a][a]
    return tot


def trace_powers(M: EndoFormMatrix, kmax: int) -> list[Form]:
    """[tr M^1, ..., tr M^kmax]."""
    out = []
    P = M
    for k in range(1, kmax + 1):
        if k > 1:
            P = mat_mul(P, M)
        out.append(trace(P))
    return out


def char_form(phi: InvariantPolynomial, M: EndoFormMatrix, degree: int | None = None) -> Form:
    """c_Phi(M) = prod_k (tr M^k)^{sigma_k}."""
    if degree is not None and degree != phi.degree:
        raise ValueError(f"degree mismatch: {phi!r} has degree {phi.degree}, expected {degree}")
    traces = trace_powers(M, phi.degree)
    out = M.ctx.one()
    for k, s in enumerate(phi.sigma, start=1):
        for _ in range(s):
            out = wedge(out, traces[k - 1])
    return out


def polarized(phi: InvariantPolynomial, mats: Sequence[EndoFormMatrix]) -> Form:
    """Phi applied to k matrices by the index contraction definition.

    Phi_{a_1..a_k}^{b_1..b_k} Y1_{b_1}^{a_1} ... Yk_{b_k}^{a_k}, with Phi(sigma)
    written as the class-averaged sum of delta products over permutations of
    cycle type sigma.  Factors are wedged in the order given.
    """
    k = phi.degree
    if len(mats) != k:
        raise ValueError(f"{phi!r} takes {k} arguments")
    ctx = mats[0].ctx
    n = ctx.n
    perms = [p for p in permutations(range(k)) if _cycle_type_of(p) == phi.sigma]
    total = ctx.zero()
    from itertools import product as iproduct

    for perm in perms:
        for alpha in iproduct(range(n), repeat=k):
            f = ctx.one()
            for j in range(k):
                entry = mats[j].rows[alpha[perm[j]]][alpha[j]]
                if entry.is_zero():
                    f = None
                    break
                f = wedge(f, entry)
                if f.is_zero():
                    break
            if f is not None and not f.is_zero():
                total = total + f
    return total * Fraction(1, len(perms))


def top_form_coefficient(f: Form, ref: Form) -> ScalarExpr:
    """Coefficient q with f == q*ref; raises if f is not a multiple of ref."""
    q = f.ratio_to(ref)
    if q is None:
        raise ValueError("form is not a scalar multiple of the reference form")
    return q
