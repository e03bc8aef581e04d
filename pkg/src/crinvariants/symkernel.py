"""Exact coefficient arithmetic.

Two layers live here:

* ``DimRational``: an element of Q(n), a reduced quotient of integer
  polynomials in the dimension symbol ``n``.
* ``ScalarExpr``: a sparse polynomial in named scalar symbols with
  ``DimRational`` coefficients.  A symbol table may designate one symbol as
  the imaginary unit; its square is reduced to -1 on construction.

Everything is immutable and canonical, so ``==`` is mathematical equality.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Union

Number = Union[int, Fraction]

# ---------------------------------------------------------------------------
# univariate integer polynomials, stored low degree first, no trailing zeros


def _trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def _padd(p, q):
    if len(p) < len(q):
        p, q = q, p
    out = list(p)
    for i, c in enumerate(q):
        out[i] += c
    return _trim(out)


def _pneg(p):
    return tuple(-c for c in p)


def _pmul(p, q):
    if not p or not q:
        return ()
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return tuple(out)


def _content(p):
    g = 0
    for c in p:
        g = gcd(g, c)
    return g


def _primitive(p):
    g = _content(p)
    if g == 0:
        return ()
    if p[-1] < 0:
        g = -g
    return tuple(c // g for c in p)


def _pdivmod_q(p, q):
    """Division over Q; returns Fraction coefficient tuples."""
    p = [Fraction(c) for c in p]
    dq = len(q) - 1
    lead = Fraction(q[-1])
    quot = [Fraction(0)] * max(len(p) - dq, 0)
    while len(p) - 1 >= dq and any(p):
        shift = len(p) - 1 - dq
        f = p[-1] / lead
        quot[shift] = f
        for i, c in enumerate(q):
            p[shift + i] -= f * c
        p.pop()
        while p and p[-1] == 0:
            p.pop()
    return tuple(quot), tuple(p)


def _to_integer_primitive(fp):
    if not fp:
        return ()
    den = 1
    for c in fp:
        den = den * c.denominator // gcd(den, c.denominator)
    return _primitive(tuple(int(c * den) for c in fp))


def _pgcd(p, q):
    """Primitive gcd with positive leading coefficient."""
    if not p:
        return _primitive(q) if q else ()
    if not q:
        return _primitive(p)
    if len(p) == 1 or len(q) == 1:
        return (1,)
    a, b = _primitive(p), _primitive(q)
    while b:
        _, r = _pdivmod_q(a, b)
        a, b = b, _to_integer_primitive(r)
    return _primitive(a)


def _pexact_div(p, q):
    quot, rem = _pdivmod_q(p, q)
    if rem:
        raise ArithmeticError("inexact polynomial division")
    out = []
    for c in quot:
        if c.denominator != 1:
            raise ArithmeticError("non-integral quotient")
        out.append(int(c))
    return _trim(out)


def _peval(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


# ---------------------------------------------------------------------------


class DimRational:
    """Reduced element of Q(n).

    Invariants: ``den`` is nonzero with positive leading coefficient, the
    numerator and denominator are coprime in Q[n] and their joint integer
    content is 1.  Zero is ``0/1``.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num=(), den=(1,), _normalized=False):
        num = _trim(num)
        den = _trim(den)
        if not den:
            raise ZeroDivisionError("denominator is the zero polynomial")
        if not _normalized:
            num, den = DimRational._normalize(num, den)
        self.num = num
        self.den = den
        self._hash = None

    @staticmethod
    def _normalize(num, den):
        if not num:
            return (), (1,)
        if len(num) == 1 and len(den) == 1:
            a, b = num[0], den[0]
            g = gcd(a, b)
            if b < 0:
                g = -g
            return (a // g,), (b // g,)
        g = _pgcd(num, den)
        if g != (1,):
            num = _pexact_div(num, g)
            den = _pexact_div(den, g)
        c = gcd(_content(num), _content(den))
        if den[-1] < 0:
            c = -c
        if c != 1:
            num = tuple(x // c for x in num)
            den = tuple(x // c for x in den)
        return num, den

    # constructors -----------------------------------------------------
    @classmethod
    def const(cls, value: Number) -> "DimRational":
        value = Fraction(value)
        return cls((value.numerator,), (value.denominator,))

    @classmethod
    def n(cls) -> "DimRational":
        return cls((0, 1), (1,), _normalized=True)

    @classmethod
    def coerce(cls, x) -> "DimRational":
        if isinstance(x, DimRational):
            return x
        if isinstance(x, (int, Fraction)):
            return cls.const(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to DimRational")

    # predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.num

    def is_constant(self) -> bool:
        return len(self.num) <= 1 and len(self.den) == 1

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} depends on n")
        return Fraction(self.num[0] if self.num else 0, self.den[0])

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, (DimRational, int, Fraction)):
            return NotImplemented
        other = DimRational.coerce(other)
        if not self.num:
            return other
        if not other.num:
            return self
        if self.den == other.den:
            return DimRational(_padd(self.num, other.num), self.den)
        return DimRational(
            _padd(_pmul(self.num, other.den), _pmul(other.num, self.den)),
            _pmul(self.den, other.den),
        )

    __radd__ = __add__

    def __neg__(self):
        return DimRational(_pneg(self.num), self.den, _normalized=True)

    def __sub__(self, other):
        if not isinstance(other, (DimRational, int, Fraction)):
            return NotImplemented
        return self + (-DimRational.coerce(other))

    def __rsub__(self, other):
        return DimRational.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, (DimRational, int, Fraction)):
            return NotImplemented
        other = DimRational.coerce(other)
        if not self.num or not other.num:
            return DimRational()
        if self.den == (1,) and other.den == (1,):
            # an integer polynomial over 1 is already reduced
            return DimRational(_pmul(self.num, other.num), (1,), _normalized=True)
        return DimRational(_pmul(self.num, other.num), _pmul(self.den, other.den))

    __rmul__ = __mul__

    def inverse(self) -> "DimRational":
        if not self.num:
            raise ZeroDivisionError("inverse of zero")
        return DimRational(self.den, self.num)

    def __truediv__(self, other):
        if not isinstance(other, (DimRational, int, Fraction)):
            return NotImplemented
        return self * DimRational.coerce(other).inverse()

    def __rtruediv__(self, other):
        return DimRational.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = DimRational.const(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # comparison -------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = DimRational.const(other)
        if not isinstance(other, DimRational):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    # evaluation -------------------------------------------------------
    def evaluate(self, n0: int) -> Fraction:
        d = _peval(self.den, n0)
        if d == 0:
            raise ZeroDivisionError(f"denominator vanishes at n={n0}")
        return Fraction(_peval(self.num, n0), d)

    def __repr__(self):
        return f"DimRational({self})"

    def __str__(self):
        num = _poly_str(self.num)
        if self.den == (1,):
            return num
        den = _poly_str(self.den)
        if len([c for c in self.num if c]) > 1:
            num = f"({num})"
        if len([c for c in self.den if c]) > 1 or len(self.den) > 1:
            den = f"({den})"
        return f"{num}/{den}"


def _poly_str(p) -> str:
    if not p:
        return "0"
    parts = []
    for k in range(len(p) - 1, -1, -1):
        c = p[k]
        if c == 0:
            continue
        mag = abs(c)
        if k == 0:
            body = str(mag)
        else:
            body = ("" if mag == 1 else f"{mag}*") + ("n" if k == 1 else f"n^{k}")
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


# ---------------------------------------------------------------------------


class SymbolTable:
    """Ordered, immutable list of scalar symbol names.

    ``imaginary`` names the symbol that squares to -1, if any.
    """

    __slots__ = ("names", "index", "imaginary", "imag_pos")

    def __init__(self, names: Iterable[str], imaginary: str | None = "i"):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError("duplicate symbol names")
        self.names = names
        self.index = {s: k for k, s in enumerate(names)}
        self.imaginary = imaginary if imaginary in self.index else None
        self.imag_pos = self.index[imaginary] if self.imaginary else -1

    def __eq__(self, other):
        return isinstance(other, SymbolTable) and self.names == other.names and self.imaginary == other.imaginary

    def __hash__(self):
        return hash((self.names, self.imaginary))

    def __repr__(self):
        return f"SymbolTable({list(self.names)})"


class ScalarExpr:
    """Sparse polynomial over Q(n) in the symbols of a ``SymbolTable``."""

    __slots__ = ("table", "terms", "_hash")

    def __init__(self, table: SymbolTable, terms: Mapping[tuple, DimRational] | None = None, _clean=False):
        self.table = table
        if terms is None:
            terms = {}
        if not _clean:
            terms = _clean_terms(table, terms)
        self.terms = terms
        self._hash = None

    # constructors -----------------------------------------------------
    @classmethod
    def const(cls, table: SymbolTable, value) -> "ScalarExpr":
        value = DimRational.coerce(value)
        if value.is_zero():
            return cls(table, {}, _clean=True)
        return cls(table, {(0,) * len(table.names): value}, _clean=True)

    @classmethod
    def symbol(cls, table: SymbolTable, name: str, power: int = 1) -> "ScalarExpr":
        if name not in table.index:
            raise KeyError(f"unknown symbol {name!r}")
        mono = [0] * len(table.names)
        mono[table.index[name]] = power
        return cls(table, {tuple(mono): DimRational.const(1)})

    def _same(self, other) -> "ScalarExpr":
        if isinstance(other, ScalarExpr):
            if other.table is not self.table and other.table != self.table:
                raise ValueError("symbol-table mismatch")
            return other
        return ScalarExpr.const(self.table, other)

    # predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        zero = (0,) * len(self.table.names)
        return all(m == zero for m in self.terms)

    def constant_term(self) -> DimRational:
        return self.terms.get((0,) * len(self.table.names), DimRational())

    def symbols(self) -> set[str]:
        used = set()
        for m in self.terms:
            for k, e in enumerate(m):
                if e:
                    used.add(self.table.names[k])
        return used

    def degree_in(self, name: str) -> int:
        k = self.table.index[name]
        return max((m[k] for m in self.terms), default=0)

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = self._same(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            prev = out.get(m)
            if prev is None:
                out[m] = c
            else:
                s = prev + c
                if s.is_zero():
                    del out[m]
                else:
                    out[m] = s
        return ScalarExpr(self.table, out, _clean=True)

    __radd__ = __add__

    def __neg__(self):
        return ScalarExpr(self.table, {m: -c for m, c in self.terms.items()}, _clean=True)

    def __sub__(self, other):
        return self + (-self._same(other))

    def __rsub__(self, other):
        return self._same(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, DimRational)):
            other = DimRational.coerce(other)
            if other.is_zero():
                return ScalarExpr(self.table, {}, _clean=True)
            return ScalarExpr(self.table, {m: c * other for m, c in self.terms.items()}, _clean=True)
        other = self._same(other)
        if not self.terms or not other.terms:
            return ScalarExpr(self.table, {}, _clean=True)
        ip = self.table.imag_pos
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                c = c1 * c2
                if ip >= 0 and m[ip] > 1:
                    e = m[ip]
                    if (e // 2) % 2:
                        c = -c
                    m = m[:ip] + (e % 2,) + m[ip + 1:]
                prev = out.get(m)
                out[m] = c if prev is None else prev + c
        return ScalarExpr(self.table, {m: c for m, c in out.items() if not c.is_zero()}, _clean=True)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = DimRational.coerce(other) if not isinstance(other, ScalarExpr) else other
        if isinstance(other, ScalarExpr):
            if not other.is_constant():
                raise ValueError("division by a non-constant scalar expression")
            other = other.constant_term()
        return self * other.inverse()

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        out = ScalarExpr.const(self.table, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # comparison -------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction, DimRational)):
            other = ScalarExpr.const(self.table, other)
        if not isinstance(other, ScalarExpr):
            return NotImplemented
        return self.table == other.table and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # transformations --------------------------------------------------
    def map_coefficients(self, fn) -> "ScalarExpr":
        return ScalarExpr(self.table, {m: DimRational.coerce(fn(c)) for m, c in self.terms.items()})

    def specialize_n(self, n0: int) -> "ScalarExpr":
        return self.map_coefficients(lambda c: c.evaluate(n0))

    def with_table(self, table: SymbolTable) -> "ScalarExpr":
        """Re-express over a larger table containing every used symbol."""
        out = {}
        for m, c in self.terms.items():
            new = [0] * len(table.names)
            for k, e in enumerate(m):
                if e:
                    name = self.table.names[k]
                    if name not in table.index:
                        raise KeyError(f"symbol {name!r} missing from target table")
                    new[table.index[name]] = e
            out[tuple(new)] = c
        return ScalarExpr(table, out)

    def substitute(self, rules: Mapping[str, "ScalarExpr"]) -> "ScalarExpr":
        """Simultaneous substitution of symbols by expressions."""
        for name, rep in rules.items():
            if name not in self.table.index:
                raise KeyError(f"unknown symbol {name!r}")
            if rep.table != self.table:
                raise ValueError("symbol-table mismatch in substitution")
        pos = {self.table.index[name]: rep for name, rep in rules.items()}
        power_cache: dict = {}

        def power(k, e):
            key = (k, e)
            if key not in power_cache:
                power_cache[key] = pos[k] ** e
            return power_cache[key]

        out = ScalarExpr(self.table, {}, _clean=True)
        for m, c in self.terms.items():
            kept = list(m)
            factor = None
            for k, e in enumerate(m):
                if e and k in pos:
                    kept[k] = 0
                    p = power(k, e)
                    factor = p if factor is None else factor * p
            term = ScalarExpr(self.table, {tuple(kept): c}, _clean=True)
            if factor is not None:
                term = term * factor
            out = out + term
        return out

    def rewrite(self, pattern: Mapping[str, int], replacement: "ScalarExpr") -> "ScalarExpr":
        """Replace every occurrence of the monomial ``pattern`` by ``replacement``."""
        pat = [0] * len(self.table.names)
        for name, e in pattern.items():
            pat[self.table.index[name]] = e
        if replacement.terms and any(
            all(m[k] >= pat[k] for k in range(len(pat))) for m in replacement.terms
        ):
            raise ValueError("replacement contains the pattern; rewriting would not terminate")
        active = [k for k, e in enumerate(pat) if e]
        out = ScalarExpr(self.table, {}, _clean=True)
        cache: dict = {}
        for m, c in self.terms.items():
            times = min(m[k] // pat[k] for k in active)
            if times == 0:
                out = out + ScalarExpr(self.table, {m: c}, _clean=True)
                continue
            rest = tuple(e - times * p for e, p in zip(m, pat))
            if times not in cache:
                cache[times] = replacement ** times
            out = out + ScalarExpr(self.table, {rest: c}, _clean=True) * cache[times]
        return out

    def divide_by_monomial(self, mono: Mapping[str, int]) -> "ScalarExpr":
        """Exact division by a monomial; raises if some term is not divisible."""
        pat = [0] * len(self.table.names)
        for name, e in mono.items():
            pat[self.table.index[name]] = e
        out = {}
        for m, c in self.terms.items():
            rest = tuple(a - b for a, b in zip(m, pat))
            if min(rest, default=0) < 0:
                raise ArithmeticError("monomial does not divide every term")
            out[rest] = c
        return ScalarExpr(self.table, out, _clean=True)

    def diff(self, name: str) -> "ScalarExpr":
        """Formal partial derivative with respect to a symbol."""
        k = self.table.index[name]
        out = {}
        for m, c in self.terms.items():
            e = m[k]
            if e:
                out[m[:k] + (e - 1,) + m[k + 1:]] = c * e
        return ScalarExpr(self.table, out, _clean=True)

    def conjugate_unit(self) -> "ScalarExpr":
        """Flip the sign of the imaginary unit (other symbols untouched)."""
        ip = self.table.imag_pos
        if ip < 0:
            return self
        return ScalarExpr(self.table, {m: (-c if m[ip] else c) for m, c in self.terms.items()}, _clean=True)

    def evaluate(self, values: Mapping[str, complex], n0: int | None = None) -> complex:
        """Numerical value; ``values`` must cover every used symbol except the unit."""
        total = 0
        for m, c in self.terms.items():
            if n0 is None:
                coef = c.constant_value()
            else:
                coef = c.evaluate(n0)
            term = complex(coef) if isinstance(coef, complex) else coef
            for k, e in enumerate(m):
                if e:
                    name = self.table.names[k]
                    v = 1j if name == self.table.imaginary else values[name]
                    term = term * v ** e
            total = total + term
        return total

    # display ----------------------------------------------------------
    def __repr__(self):
        return f"ScalarExpr({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        names = self.table.names
        parts = []
        for m in sorted(self.terms, reverse=True):
            c = self.terms[m]
            factors = []
            for k, e in enumerate(m):
                if e:
                    factors.append(names[k] if e == 1 else f"{names[k]}^{e}")
            mono = "*".join(factors)
            cs = str(c)
            if not mono:
                parts.append(f"({cs})" if (" " in cs) else cs)
            elif cs == "1":
                parts.append(mono)
            elif cs == "-1":
                parts.append("-" + mono)
            else:
                parts.append(f"({cs})*{mono}" if (" " in cs or "/" in cs) else f"{cs}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def _clean_terms(table: SymbolTable, terms):
    ip = table.imag_pos
    width = len(table.names)
    out: dict = {}
    for m, c in terms.items():
        m = tuple(m)
        if len(m) != width:
            raise ValueError("monomial length does not match the symbol table")
        c = DimRational.coerce(c)
        if ip >= 0 and m[ip] > 1:
            e = m[ip]
            if (e // 2) % 2:
                c = -c
            m = m[:ip] + (e % 2,) + m[ip + 1:]
        prev = out.get(m)
        out[m] = c if prev is None else prev + c
    return {m: c for m, c in out.items() if not c.is_zero()}


def scalar_normalize(e: ScalarExpr) -> ScalarExpr:
    """Canonical form of ``e``.  Expressions are kept canonical, so this rebuilds and checks."""
    return ScalarExpr(e.table, dict(e.terms))


def substitute(e: ScalarExpr, rules: Mapping[str, ScalarExpr]) -> ScalarExpr:
    return e.substitute(rules)


def p_varsigma(sigma: Iterable[int]) -> DimRational:
    """prod_k (n + (-n)^k)^{sigma_k} as an element of Q(n)."""
    n = DimRational.n()
    out = DimRational.const(1)
    for k, s in enumerate(sigma, start=1):
        if s:
            out = out * (n + (-n) ** k) ** s
    return out
