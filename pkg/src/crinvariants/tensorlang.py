"""Abstract-index tensor expressions with a symbolic dimension.

A term is ``coefficient * (scalar atoms) * (ordered word of one-form atoms)``.
Every atom slot carries a label: a string for a free index, an integer for a
dummy.  Levi-form raising and lowering is absorbed eagerly: a slot is reduced
to its *effective variance* ('u' for holomorphic-up or antiholomorphic-down,
'd' otherwise), and a contraction pairs one 'u' slot with one 'd' slot.  The
metric itself is the built-in atom ``delta``.

Canonical form of a term:

1. deltas are absorbed (a traced delta becomes the dimension ``n``);
2. registered pair rules replace contracted pairs of one-slot atoms;
3. the contraction graph is split into connected components, each component
   is put in a minimal encoding by brute force over its (small) automorphism
   candidates, components are sorted, and dummies renumbered in order;
4. the one-form word is reordered to follow the components and the sign of
   that permutation goes into the coefficient.

Two isomorphic components with an odd number of one-forms force the term to
vanish (swapping them is an odd permutation that fixes the term).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product
from typing import Callable, Iterable, Mapping, Sequence

from .symkernel import DimRational, ScalarExpr, SymbolTable

HOL, ANTI = "hol", "anti"
UP, DOWN = "up", "down"
DELTA = "delta"


def effective(kind: str, variance: str) -> str:
    if kind not in (HOL, ANTI) or variance not in (UP, DOWN):
        raise ValueError(f"bad slot ({kind}, {variance})")
    return "u" if (kind, variance) in ((HOL, UP), (ANTI, DOWN)) else "d"


@dataclass(frozen=True)
class AtomDef:
    name: str
    slots: tuple = ()
    grade: int = 0
    symmetries: tuple = ()
    conjugate: str | None = None

    @property
    def effs(self) -> tuple:
        return tuple(effective(k, v) for k, v in self.slots)


def _compose(p, q):
    # (p after q) acting on label positions
    return tuple(q[p[k]] for k in range(len(p)))


class AtomTable:
    """Registry of atom definitions with their closed symmetry groups."""

    def __init__(self):
        self.defs: dict[str, AtomDef] = {}
        self.groups: dict[str, list] = {}
        self.register(AtomDef(DELTA, ((HOL, DOWN), (HOL, UP)), 0, (), DELTA))

    def register(self, d: AtomDef) -> AtomDef:
        if d.grade not in (0, 1):
            raise ValueError("atoms are 0-forms or one-forms")
        r = len(d.slots)
        ident = tuple(range(r))
        group = {ident: 1}
        frontier = [ident]
        gens = [(tuple(p), s) for p, s in d.symmetries]
        for p, s in gens:
            if sorted(p) != list(ident):
                raise ValueError(f"{d.name}: symmetry {p} is not a permutation")
            if any(d.effs[k] != d.effs[p[k]] for k in range(r)):
                raise ValueError(f"{d.name}: symmetry mixes slot variances")
        while frontier:
            g = frontier.pop()
            for p, s in gens:
                h = _compose(g, p)
                sign = group[g] * s
                if h in group:
                    if group[h] != sign:
                        raise ValueError(f"{d.name}: symmetry group forces the atom to vanish")
                    continue
                group[h] = sign
                frontier.append(h)
        self.defs[d.name] = d
        self.groups[d.name] = list(group.items())
        return d

    def __getitem__(self, name: str) -> AtomDef:
        try:
            return self.defs[name]
        except KeyError:
            raise KeyError(f"unknown atom {name!r}") from None

    def __contains__(self, name):
        return name in self.defs

    def check_conjugation(self):
        for name, d in self.defs.items():
            if d.conjugate is None:
                continue
            other = self[d.conjugate]
            if other.conjugate != name:
                raise ValueError(f"conjugation is not an involution on {name!r}")
            if name != DELTA and tuple("u" if e == "d" else "d" for e in d.effs) != other.effs:
                raise ValueError(f"{name!r} and its conjugate have incompatible slots")


class RelationTable:
    """Contraction, rewrite and derivative rules for one computation context."""

    def __init__(self, table: SymbolTable, atoms: AtomTable | None = None, trace_value=None):
        self.table = table
        self.atoms = atoms or AtomTable()
        self.trace_value = DimRational.coerce(trace_value) if trace_value is not None else DimRational.n()
        self.pair_rules: dict[tuple, ScalarExpr] = {}
        self.scalar_rewrites: list[tuple[dict, ScalarExpr]] = []
        self.deriv_rules: dict[tuple, "TensorExpr"] = {}
        self.scalar_deriv_rules: dict[tuple, "TensorExpr"] = {}
        self.constant_symbols: set[str] = set()
        self.scalar_conjugation: dict[str, str] = {}
        self.display_pairs: dict[tuple, tuple] = {}
        self.display_mixed: dict[tuple, str] = {}
        if table.imaginary:
            self.constant_symbols.add(table.imaginary)

    # registration -----------------------------------------------------
    @staticmethod
    def measure(contractions: int, atoms: int, degree: int) -> tuple:
        return (contractions, atoms, degree)

    def add_pair_rule(self, a: str, b: str, value) -> None:
        """``a_g b^g`` (one slot each, contracted) is replaced by a scalar."""
        da, db = self.atoms[a], self.atoms[b]
        if len(da.slots) != 1 or len(db.slots) != 1:
            raise ValueError("pair rules apply to one-slot atoms")
        if da.effs[0] == db.effs[0]:
            raise ValueError("pair rule slots cannot be contracted")
        value = value if isinstance(value, ScalarExpr) else ScalarExpr.const(self.table, value)
        if da.grade + db.grade != 0 and not value.is_zero():
            raise ValueError("a contracted pair of one-forms can only be replaced by zero")
        before = self.measure(1, 2, 0)
        after = self.measure(0, 0, max((sum(m) for m in value.terms), default=0))
        if not after < before:
            raise ValueError("rule does not decrease the termination measure")
        self.pair_rules[tuple(sorted((a, b)))] = value

    def add_scalar_rewrite(self, pattern: Mapping[str, int], replacement: ScalarExpr) -> None:
        self.scalar_rewrites.append((dict(pattern), replacement))

    def add_derivative_rule(self, atom: str, direction: str, replacement: "TensorExpr") -> None:
        """``replacement`` uses labels '_0', '_1', ... for the atom slots and '_d' for the new index."""
        if direction not in (HOL, ANTI):
            raise ValueError("direction must be hol or anti")
        self.atoms[atom]
        self.deriv_rules[(atom, direction)] = replacement

    def add_scalar_derivative_rule(self, symbol: str, direction: str, replacement: "TensorExpr") -> None:
        if symbol not in self.table.index:
            raise KeyError(f"unknown symbol {symbol!r}")
        self.scalar_deriv_rules[(symbol, direction)] = replacement

    # helpers ----------------------------------------------------------
    def scalar(self, value) -> ScalarExpr:
        if isinstance(value, ScalarExpr):
            return value
        return ScalarExpr.const(self.table, value)

    def sym(self, name: str, power: int = 1) -> ScalarExpr:
        return ScalarExpr.symbol(self.table, name, power)

    def term(self, coeff=1, scalars: Sequence = (), word: Sequence = ()) -> "TensorExpr":
        """Build a one-term expression; repeated string labels are contracted."""
        coeff = self.scalar(coeff)
        scalars = [(name, tuple(labels)) for name, labels in scalars]
        word = [(name, tuple(labels)) for name, labels in word]
        return TensorExpr.from_raw(self, [(coeff, scalars, word)])

    def zero(self, free: Iterable = ()) -> "TensorExpr":
        return TensorExpr(self, {}, frozenset(free))

    def one(self) -> "TensorExpr":
        return self.term(1)

    def atom(self, name: str, *labels) -> "TensorExpr":
        d = self.atoms[name]
        if len(labels) != len(d.slots):
            raise ValueError(f"{name} takes {len(d.slots)} labels")
        if d.grade:
            return self.term(1, (), [(name, labels)])
        return self.term(1, [(name, labels)], ())

    def delta(self, lower, upper) -> "TensorExpr":
        return self.atom(DELTA, lower, upper)


# ---------------------------------------------------------------------------
# canonicalization


def _label_effs(rel: RelationTable, scalars, word) -> dict:
    occ: dict = {}
    for name, labels in list(scalars) + list(word):
        effs = rel.atoms[name].effs
        if len(labels) != len(effs):
            raise ValueError(f"atom {name} has {len(effs)} slots, got {len(labels)} labels")
        for lab, e in zip(labels, effs):
            occ.setdefault(lab, []).append(e)
    return occ


def _parity(seq: Sequence[int]) -> int:
    inv = 0
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                inv += 1
    return -1 if inv % 2 else 1


def _label_code(lab, local):
    if isinstance(lab, int):
        if lab not in local:
            local[lab] = len(local)
        return (0, local[lab])
    return (1, lab)


class _Atom:
    __slots__ = ("name", "labels", "pos", "grade")

    def __init__(self, name, labels, pos, grade):
        self.name = name
        self.labels = list(labels)
        self.pos = pos
        self.grade = grade


def _canon_term(rel: RelationTable, coeff: ScalarExpr, scalars, word):
    """Return ``(key, coeff)`` or ``None`` when the term vanishes."""
    if coeff.is_zero():
        return None
    atoms_t = rel.atoms
    atoms = [_Atom(n, l, None, 0) for n, l in scalars]
    atoms += [_Atom(n, l, p, 1) for p, (n, l) in enumerate(word)]
    for a in atoms:
        if atoms_t[a.name].grade != a.grade:
            raise ValueError(f"atom {a.name} placed with the wrong grade")

    # 1-2: deltas and pair rules until nothing changes
    changed = True
    while changed:
        changed = False
        for a in atoms:
            if a is None or a.name != DELTA:
                continue
            x, y = a.labels
            if isinstance(x, int) and x == y:
                coeff = coeff * rel.trace_value
            elif isinstance(x, int):
                _replace_label(atoms, a, x, y)
            elif isinstance(y, int):
                _replace_label(atoms, a, y, x)
            else:
                continue
            atoms[atoms.index(a)] = None
            changed = True
            break
        atoms = [a for a in atoms if a is not None]
        if changed:
            continue
        where: dict = {}
        for a in atoms:
            for lab in a.labels:
                if isinstance(lab, int):
                    where.setdefault(lab, []).append(a)
        for lab, pair in where.items():
            if len(pair) != 2 or pair[0] is pair[1]:
                continue
            a, b = pair
            if len(a.labels) != 1 or len(b.labels) != 1:
                continue
            rule = rel.pair_rules.get(tuple(sorted((a.name, b.name))))
            if rule is None:
                continue
            if rule.is_zero():
                return None
            coeff = coeff * rule
            atoms = [x for x in atoms if x is not a and x is not b]
            changed = True
            break
    if coeff.is_zero():
        return None

    # validity of the index structure
    seen: dict = {}
    for a in atoms:
        for lab, e in zip(a.labels, atoms_t[a.name].effs):
            seen.setdefault(lab, []).append(e)
    for lab, effs in seen.items():
        if isinstance(lab, int):
            if sorted(effs) != ["d", "u"]:
                raise ValueError(f"dummy {lab} must pair one up and one down slot, got {effs}")
        elif len(effs) != 1:
            raise ValueError(f"free label {lab!r} occurs {len(effs)} times")

    # 3: connected components through dummies
    parent = list(range(len(atoms)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    first: dict = {}
    for i, a in enumerate(atoms):
        for lab in a.labels:
            if isinstance(lab, int):
                if lab in first:
                    ri, rj = find(i), find(first[lab])
                    if ri != rj:
                        parent[ri] = rj
                else:
                    first[lab] = i
    comps: dict = {}
    for i in range(len(atoms)):
        comps.setdefault(find(i), []).append(atoms[i])

    canon_comps = []
    for comp in comps.values():
        res = _canon_component(rel, comp)
        if res is None:
            return None
        canon_comps.append(res)
    canon_comps.sort(key=lambda r: r[0])
    for r1, r2 in zip(canon_comps, canon_comps[1:]):
        if r1[0] == r2[0] and r1[2] % 2 == 1:
            return None

    sign = 1
    ordered = []
    for enc, arrangement, n_odd, s in canon_comps:
        sign *= s
        ordered.extend(arrangement)
    relabel: dict = {}
    new_scalars, new_word, positions = [], [], []
    for name, labels, pos in ordered:
        labs = []
        for lab in labels:
            if isinstance(lab, int):
                if lab not in relabel:
                    relabel[lab] = len(relabel)
                labs.append(relabel[lab])
            else:
                labs.append(lab)
        if pos is None:
            new_scalars.append((name, tuple(labs)))
        else:
            new_word.append((name, tuple(labs)))
            positions.append(pos)
    sign *= _parity(positions)
    if sign < 0:
        coeff = -coeff
    for pattern, rep in rel.scalar_rewrites:
        coeff = coeff.rewrite(pattern, rep)
    if coeff.is_zero():
        return None
    return (tuple(new_scalars), tuple(new_word)), coeff


def _replace_label(atoms, skip, old, new):
    for b in atoms:
        if b is None or b is skip:
            continue
        for k, lab in enumerate(b.labels):
            if lab == old:
                b.labels[k] = new
                return
    raise ValueError(f"dummy {old} has no partner")


def _canon_component(rel: RelationTable, comp):
    """Minimal encoding of one connected component.

    Returns (encoding, arrangement, number of one-forms, sign) or None when
    an automorphism shows the component equals its own negative.
    """
    atoms_t = rel.atoms

    def invariant(a):
        frees = tuple(sorted(l for l in a.labels if not isinstance(l, int)))
        return (a.grade, a.name, frees)

    comp = sorted(comp, key=invariant)
    blocks: list = []
    for a in comp:
        if blocks and invariant(blocks[-1][0]) == invariant(a):
            blocks[-1].append(a)
        else:
            blocks.append([a])
    if sum(len(b) for b in blocks if len(b) > 1) > 8:
        raise NotImplementedError("component too symmetric for brute-force canonicalization")

    best = None
    for orders in product(*[list(permutations(b)) for b in blocks]):
        seq = [a for block in orders for a in block]
        for choice in product(*[atoms_t.groups[a.name] for a in seq]):
            local: dict = {}
            enc = []
            arrangement = []
            s = 1
            for a, (perm, sg) in zip(seq, choice):
                labs = [a.labels[perm[k]] for k in range(len(perm))]
                s *= sg
                enc.append((a.grade, a.name, tuple(_label_code(l, local) for l in labs)))
                arrangement.append((a.name, tuple(labs), a.pos))
            enc = tuple(enc)
            odd_pos = [a.pos for a in seq if a.grade == 1]
            rel_sign = s * _parity(odd_pos)
            if best is None or enc < best[0]:
                best = (enc, arrangement, rel_sign, s)
            elif enc == best[0] and rel_sign != best[2]:
                return None
    n_odd = sum(1 for a in comp if a.grade == 1)
    return best[0], best[1], n_odd, best[3]


# ---------------------------------------------------------------------------


class TensorExpr:
    """Canonical sum of terms with a fixed free-index signature."""

    __slots__ = ("rel", "terms", "free")

    def __init__(self, rel: RelationTable, terms: dict, free: frozenset):
        self.rel = rel
        self.terms = terms
        self.free = frozenset(free)

    # construction -----------------------------------------------------
    @classmethod
    def from_raw(cls, rel: RelationTable, raw, free=None) -> "TensorExpr":
        """Canonicalize raw ``(coeff, scalars, word)`` triples.

        Repeated string labels inside one raw term are turned into dummies.
        """
        out: dict = {}
        sig = None
        for coeff, scalars, word in raw:
            scalars, word, term_free = _contract_repeated(rel, scalars, word)
            if sig is None:
                sig = term_free
            elif term_free != sig:
                raise ValueError(f"free indices differ across terms: {sorted(sig)} vs {sorted(term_free)}")
            res = _canon_term(rel, coeff, scalars, word)
            if res is None:
                continue
            key, c = res
            _accumulate(out, key, c)
        if free is None:
            free = sig or frozenset()
        elif sig is not None and frozenset(free) != sig:
            raise ValueError("declared free indices do not match the terms")
        return cls(rel, out, frozenset(free))

    def _check(self, other: "TensorExpr"):
        if not isinstance(other, TensorExpr):
            raise TypeError("expected a TensorExpr")
        if other.rel is not self.rel:
            raise ValueError("expressions belong to different relation tables")

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, (int, Fraction, DimRational, ScalarExpr)):
            other = self.rel.term(other)
        self._check(other)
        if not self.terms:
            if self.free and other.free != self.free and other.terms:
                raise ValueError("non-matching free indices")
            return other if other.terms or not self.free else self
        if not other.terms:
            if other.free and other.free != self.free:
                raise ValueError("non-matching free indices")
            return self
        if self.free != other.free:
            raise ValueError(f"non-matching free indices: {sorted(self.free)} vs {sorted(other.free)}")
        out = dict(self.terms)
        for k, c in other.terms.items():
            _accumulate(out, k, c)
        return TensorExpr(self.rel, out, self.free)

    __radd__ = __add__

    def __neg__(self):
        return TensorExpr(self.rel, {k: -c for k, c in self.terms.items()}, self.free)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, DimRational, ScalarExpr)):
            other = self.rel.term(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, factor) -> "TensorExpr":
        factor = self.rel.scalar(factor) if not isinstance(factor, DimRational) else factor
        out: dict = {}
        for k, c in self.terms.items():
            nc = c * factor
            for pattern, rep in self.rel.scalar_rewrites:
                nc = nc.rewrite(pattern, rep)
            if not nc.is_zero():
                out[k] = nc
        return TensorExpr(self.rel, out, self.free)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, DimRational, ScalarExpr)):
            return self.scale(other)
        self._check(other)
        shared = {l for l, _ in self.free} & {l for l, _ in other.free}
        effs_a = dict(self.free)
        effs_b = dict(other.free)
        for lab in shared:
            if effs_a[lab] == effs_b[lab]:
                raise ValueError(f"label {lab!r} repeated with the same variance")
        free = frozenset((l, e) for l, e in self.free | other.free if l not in shared)
        out: dict = {}
        for (s1, w1), c1 in self.terms.items():
            top = _max_dummy(s1, w1) + 1
            for (s2, w2), c2 in other.terms.items():
                s2s, w2s = _shift(s2, top), _shift(w2, top)
                scalars = list(s1) + list(s2s)
                word = list(w1) + list(w2s)
                if shared:
                    base = top + _max_dummy(s2, w2) + 1
                    mapping = {lab: base + k for k, lab in enumerate(sorted(shared))}
                    scalars = _relabel_list(scalars, mapping)
                    word = _relabel_list(word, mapping)
                res = _canon_term(self.rel, c1 * c2, scalars, word)
                if res is not None:
                    _accumulate(out, res[0], res[1])
        return TensorExpr(self.rel, out, free)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, DimRational, ScalarExpr)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = self.rel.one()
        for _ in range(k):
            out = out * self
        return out

    # comparison -------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, TensorExpr):
            return NotImplemented
        if not self.terms and not other.terms:
            return True
        return self.free == other.free and self.terms == other.terms

    def __hash__(self):
        return hash((self.free, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    # index operations -------------------------------------------------
    def relabel(self, mapping: Mapping[str, object]) -> "TensorExpr":
        """Rename free labels.  Mapping two labels to one contracts them."""
        raw = []
        for (s, w), c in self.terms.items():
            top = _max_dummy(s, w) + 1
            m = {}
            for k, v in mapping.items():
                m[k] = (top + v) if isinstance(v, int) else v
            raw.append((c, _relabel_list(s, m), _relabel_list(w, m)))
        new_free = set()
        targets: dict = {}
        for lab, e in self.free:
            tgt = mapping.get(lab, lab)
            targets.setdefault(tgt, []).append(e)
        for tgt, effs in targets.items():
            if isinstance(tgt, int):
                continue
            if len(effs) == 1:
                new_free.add((tgt, effs[0]))
            elif sorted(effs) != ["d", "u"]:
                raise ValueError(f"cannot contract label {tgt!r}")
        if not raw:
            return TensorExpr(self.rel, {}, frozenset(new_free))
        return TensorExpr.from_raw(self.rel, raw, frozenset(new_free))

    def contract(self, down_label: str, up_label: str) -> "TensorExpr":
        effs = dict(self.free)
        if effs.get(down_label) != "d" or effs.get(up_label) != "u":
            raise ValueError("contract needs one free 'd' label and one free 'u' label")
        tag = "__c__"
        return self.relabel({down_label: tag, up_label: tag})

    def conjugate(self) -> "TensorExpr":
        rel = self.rel
        sconj = {}
        for a, b in rel.scalar_conjugation.items():
            sconj[a] = rel.sym(b)
        raw = []
        for (s, w), c in self.terms.items():
            nc = c.conjugate_unit()
            if sconj:
                nc = nc.substitute({k: v for k, v in sconj.items() if k in nc.symbols()})
            raw.append((nc, [_conj_atom(rel, a) for a in s], [_conj_atom(rel, a) for a in w]))
        free = frozenset((l, "u" if e == "d" else "d") for l, e in self.free)
        if not raw:
            return TensorExpr(rel, {}, free)
        return TensorExpr.from_raw(rel, raw, free)

    def map_coefficients(self, fn: Callable[[ScalarExpr], ScalarExpr]) -> "TensorExpr":
        out: dict = {}
        for k, c in self.terms.items():
            nc = fn(c)
            if not nc.is_zero():
                _accumulate(out, k, nc)
        return TensorExpr(self.rel, out, self.free)

    def coefficient_of(self, other: "TensorExpr") -> ScalarExpr:
        """Coefficient of the single-term expression ``other`` in ``self``."""
        if len(other.terms) != 1:
            raise ValueError("expected a single-term expression")
        (key, c), = other.terms.items()
        mine = self.terms.get(key)
        if mine is None:
            return ScalarExpr.const(self.rel.table, 0)
        if not c.is_constant():
            raise ValueError("reference term must have a constant coefficient")
        return mine / c.constant_term()

    # display ----------------------------------------------------------
    def __repr__(self):
        return f"TensorExpr({self})"

    def __str__(self):
        return display(self)


def _conj_atom(rel, atom):
    name, labels = atom
    d = rel.atoms[name]
    if d.conjugate is None:
        raise ValueError(f"atom {name!r} has no registered conjugate")
    if name == DELTA:
        return (DELTA, (labels[1], labels[0]))
    return (d.conjugate, labels)


def _accumulate(out, key, c):
    prev = out.get(key)
    if prev is None:
        out[key] = c
    else:
        s = prev + c
        if s.is_zero():
            del out[key]
        else:
            out[key] = s


def _max_dummy(s, w) -> int:
    m = -1
    for _, labels in list(s) + list(w):
        for lab in labels:
            if isinstance(lab, int) and lab > m:
                m = lab
    return m


def _shift(atoms, offset):
    if offset == 0:
        return list(atoms)
    return [(n, tuple(l + offset if isinstance(l, int) else l for l in labels)) for n, labels in atoms]


def _relabel_list(atoms, mapping):
    return [(n, tuple(mapping.get(l, l) if not isinstance(l, int) else l for l in labels)) for n, labels in atoms]


def _contract_repeated(rel, scalars, word):
    occ = _label_effs(rel, scalars, word)
    top = _max_dummy(scalars, word) + 1
    mapping = {}
    free = set()
    for lab, effs in occ.items():
        if isinstance(lab, int):
            continue
        if len(effs) == 1:
            free.add((lab, effs[0]))
        elif len(effs) == 2 and sorted(effs) == ["d", "u"]:
            mapping[lab] = top + len(mapping)
        else:
            raise ValueError(f"label {lab!r} used {len(effs)} times with variances {effs}")
    if mapping:
        scalars = _relabel_list(scalars, mapping)
        word = _relabel_list(word, mapping)
    return list(scalars), list(word), frozenset(free)


# ---------------------------------------------------------------------------
# public operations


def contract_canonicalize(e: TensorExpr, rel: RelationTable | None = None) -> TensorExpr:
    """Recompute the normal form of ``e`` under ``rel`` (default: its own table)."""
    rel = rel or e.rel
    raw = [(c, list(s), list(w)) for (s, w), c in e.terms.items()]
    if not raw:
        return TensorExpr(rel, {}, e.free)
    return TensorExpr.from_raw(rel, raw, e.free)


def gen_kronecker_expand(rel: RelationTable, k: int, lower: Sequence[str] | None = None,
                         upper: Sequence[str] | None = None) -> TensorExpr:
    """Generalized Kronecker delta as a signed sum over the k! permutations."""
    if k < 1:
        raise ValueError("k must be positive")
    lower = list(lower) if lower is not None else [f"a{j}" for j in range(1, k + 1)]
    upper = list(upper) if upper is not None else [f"b{j}" for j in range(1, k + 1)]
    if len(lower) != k or len(upper) != k:
        raise ValueError("label lists must have length k")
    raw = []
    for perm in permutations(range(k)):
        sign = _parity(perm)
        scalars = [(DELTA, (lower[j], upper[perm[j]])) for j in range(k)]
        raw.append((rel.scalar(sign), scalars, []))
    return TensorExpr.from_raw(rel, raw)


def _trace_pair(u: TensorExpr, down: str, up: str) -> TensorExpr:
    return u.contract(down, up)


def _require_signature(T: TensorExpr, sig: Mapping[str, str]):
    if T.free != frozenset(sig.items()) and T.terms:
        raise ValueError(f"expected free signature {sorted(sig.items())}, got {sorted(T.free)}")


def tf4(T: TensorExpr, a="al", b="be", g="ga", s="si") -> TensorExpr:
    """Totally trace-free part of a tensor with slots (hol down, antihol down, hol down, antihol down).

    The input is first symmetrized in (a, g) and in (b, s); on inputs that
    already have those symmetries this is the usual projector.
    """
    _require_signature(T, {a: "d", b: "u", g: "d", s: "u"})
    rel = T.rel
    n = rel.trace_value
    half = Fraction(1, 2)
    u = (T + T.relabel({a: g, g: a})).scale(half)
    u = (u + u.relabel({b: s, s: b})).scale(half)
    t = _trace_pair(u, g, s)  # u_{a b mu}^mu with free (a, b)
    full = _trace_pair(t, a, b)
    d = rel.delta
    first = (t * d(g, s)
             + t.relabel({a: g}) * d(a, s)
             + t.relabel({b: s}) * d(g, b)
             + t.relabel({a: g, b: s}) * d(a, b))
    second = full * (d(a, b) * d(g, s) + d(a, s) * d(g, b))
    return u - first.scale(1 / (n + 2)) + second.scale(1 / ((n + 1) * (n + 2)))


def tf3(T: TensorExpr, a="al", b="be", g="ga") -> TensorExpr:
    """Trace-free part of a tensor with slots (hol down, antihol down, hol down).

    The input is symmetrized in (a, g) first.
    """
    _require_signature(T, {a: "d", b: "u", g: "d"})
    rel = T.rel
    n = rel.trace_value
    u = (T + T.relabel({a: g, g: a})).scale(Fraction(1, 2))
    t = _trace_pair(u, a, b)  # u_mu^mu_g with free g
    d = rel.delta
    return u - (t * d(a, b) + t.relabel({g: a}) * d(g, b)).scale(1 / (n + 1))


def _instantiate(template: TensorExpr, mapping: Mapping[str, object], top: int):
    """Relabel a rule template into raw terms, shifting its dummies above ``top``."""
    raw = []
    for (s, w), c in template.terms.items():
        s2, w2 = _shift(s, top), _shift(w, top)
        raw.append((c, _relabel_list(s2, mapping), _relabel_list(w2, mapping)))
    return raw


def derive(e: TensorExpr, direction: str, label: str, rel: RelationTable | None = None) -> TensorExpr:
    """Covariant derivative in the given direction with new free index ``label``.

    Holomorphic derivatives add a 'd' slot, antiholomorphic ones a 'u' slot.
    Every scalar atom and every non-constant coefficient symbol needs a rule.
    """
    rel = rel or e.rel
    if direction not in (HOL, ANTI):
        raise ValueError("direction must be hol or anti")
    if any(l == label for l, _ in e.free):
        raise ValueError(f"label {label!r} already free")
    new_eff = "d" if direction == HOL else "u"
    free = frozenset(set(e.free) | {(label, new_eff)})
    raw = []
    for (s, w), c in e.terms.items():
        for name, _ in w:
            if (name, direction) not in rel.deriv_rules:
                raise KeyError(f"missing derivative rule for one-form atom {name!r}")
        top = _max_dummy(s, w) + 1
        for idx, (name, labels) in enumerate(s):
            rule = rel.deriv_rules.get((name, direction))
            if rule is None:
                if name == DELTA:
                    continue
                raise KeyError(f"missing derivative rule for atom {name!r} ({direction})")
            mapping = {f"_{k}": lab for k, lab in enumerate(labels)}
            mapping["_d"] = label
            rest = list(s[:idx]) + list(s[idx + 1:])
            for rc, rs, rw in _instantiate(rule, mapping, top):
                raw.append((c * rc, rest + rs, rw + list(w)))
        for sym in c.symbols():
            if sym in rel.constant_symbols:
                continue
            rule = rel.scalar_deriv_rules.get((sym, direction))
            if rule is None:
                raise KeyError(f"missing derivative rule for symbol {sym!r} ({direction})")
            dc = c.diff(sym)
            if dc.is_zero():
                continue
            for rc, rs, rw in _instantiate(rule, {"_d": label}, top):
                raw.append((dc * rc, list(s) + rs, rw + list(w)))
    if not raw:
        return TensorExpr(rel, {}, free)
    return TensorExpr.from_raw(rel, raw, free)


# ---------------------------------------------------------------------------
# component evaluation


def component_values(e: TensorExpr, n0: int, atom_values: Mapping[str, Callable],
                     symbol_values: Mapping[str, object], order: Sequence[str] | None = None) -> dict:
    """Enumerate components of a 0-form expression at dimension ``n0``.

    ``atom_values[name](*indices)`` gives the component of an atom (indices run
    over 0..n0-1); the metric is the identity.  Coefficients are evaluated at
    ``n = n0`` with ``symbol_values``.  Returns {free index tuple: value}.
    """
    order = list(order) if order is not None else sorted(l for l, _ in e.free)
    out: dict = {}
    coeff_cache: dict = {}
    for (s, w), c in e.terms.items():
        if w:
            raise ValueError("component evaluation applies to 0-form expressions")
        if c not in coeff_cache:
            coeff_cache[c] = c.evaluate(symbol_values, n0)
        cv = coeff_cache[c]
        dummies = sorted({l for _, labels in s for l in labels if isinstance(l, int)})
        for free_vals in product(range(n0), repeat=len(order)):
            env = dict(zip(order, free_vals))
            total = 0
            for dvals in product(range(n0), repeat=len(dummies)):
                env.update(zip(dummies, dvals))
                val = cv
                for name, labels in s:
                    idx = [env[l] for l in labels]
                    if name == DELTA:
                        v = 1 if idx[0] == idx[1] else 0
                    else:
                        v = atom_values[name](*idx)
                    val = val * v
                    if val == 0:
                        break
                total = total + val
            out[free_vals] = out.get(free_vals, 0) + total
    if not e.terms:
        for free_vals in product(range(n0), repeat=len(order)):
            out[free_vals] = 0
    return out


# ---------------------------------------------------------------------------
# display


def display(e: TensorExpr) -> str:
    """Readable rendering using the table's registered display names.

    ``rel.display_pairs[(a, b)] = (token, factor)`` shows a contracted pair of
    adjacent one-forms ``a b`` as ``token`` times ``factor``; ``rel.display_mixed``
    does the same for a scalar atom contracted with a one-form.
    """
    if not e.terms:
        return "0"
    rel = e.rel
    parts = []
    for (s, w), c in sorted(e.terms.items(), key=lambda kv: repr(kv[0])):
        coef = c
        scalars = list(s)
        factors = []
        k = 0
        while k < len(w):
            name, labels = w[k]
            if k + 1 < len(w) and len(labels) == 1 and isinstance(labels[0], int):
                hit = rel.display_pairs.get((name, w[k + 1][0]))
                if hit and w[k + 1][1] == labels:
                    token, factor = hit
                    factors.append(token)
                    coef = coef * factor
                    k += 2
                    continue
            if len(labels) == 1 and isinstance(labels[0], int):
                partner = next((a for a in scalars if a[1] == labels
                                and (a[0], name) in rel.display_mixed), None)
                if partner is not None:
                    scalars.remove(partner)
                    factors.append(rel.display_mixed[(partner[0], name)])
                    k += 1
                    continue
            factors.append(_atom_str(name, labels))
            k += 1
        body = " ".join([_atom_str(n, l) for n, l in scalars] + factors)
        parts.append(f"({coef})" + (f" {body}" if body else ""))
    return " + ".join(parts)


def _atom_str(name, labels):
    if not labels:
        return name
    return f"{name}[{','.join(str(l) for l in labels)}]"
