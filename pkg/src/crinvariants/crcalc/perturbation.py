"""First-order perturbation of the round sphere by the quartic |w|^4 term.

Symbolic mode works at symbolic n with tensorlang; concrete mode rebuilds the
same objects componentwise in the Grassmann backend and compares.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from ..exterior import EndoFormMatrix, GrassmannContext, trace
from ..symkernel import DimRational, ScalarExpr
from ..tensorlang import HOL, TensorExpr, derive, tf3, tf4
from . import context as ctxmod
from .bridge import Bridge
from .context import AL, BE, Forms, base_relations, matmul
from .report import CaseResult, SuiteReport, compare, timed

N = DimRational.n()
R = (N + 1) / (N + 2)


def neg_n_pow(k: int) -> DimRational:
    return (-N) ** k


@dataclass
class PerturbationContext:
    mode: str
    n: int | None
    rel: object
    F: Forms
    c: ScalarExpr
    Sdot: TensorExpr
    Vdot: TensorExpr
    Cdot: TensorExpr
    Vform: TensorExpr
    W: TensorExpr
    Psi: TensorExpr
    M: TensorExpr
    P: TensorExpr
    checks: list = field(default_factory=list)
    G: GrassmannContext | None = None
    bridge: Bridge | None = None
    Cdot_m: EndoFormMatrix | None = None
    Vform_m: EndoFormMatrix | None = None

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)


def _raw_S(rel) -> TensorExpr:
    return rel.term(1, [("w1", (AL,)), ("wb1", (BE,)), ("w1", ("ga",)), ("wb1", ("si",))])


def _raw_V(rel) -> TensorExpr:
    return rel.term(1, [("w1", (AL,)), ("wb1", (BE,)), ("w1", ("ga",))])


def symbolic_objects(rel=None):
    rel = rel or base_relations()
    F = Forms(rel)
    i, c, wb = F.i, F.c, F.wb
    dth, dw, dbwb = F.dtheta(), F.dw(), F.dbwb()
    Sdot = tf4(_raw_S(rel))
    Vdot = tf3(_raw_V(rel)) * (-(N + 3) / (N + 2) * i * wb)
    Cdot = Sdot.relabel({"ga": "mu", "si": "nu"}) * rel.term(i, (), [("thu", ("mu",)), ("thd", ("nu",))])
    Vform = Vdot.relabel({"ga": "mu"}) * rel.term(1, (), [("thu", ("mu",))])
    wwb = rel.term(1, [("w1", (AL,)), ("wb1", (BE,))])
    W = wwb * dw * dbwb * i
    Psi = (wwb * dth
           + rel.term(i, [("w1", (AL,))], [("thu", (BE,))]) * dbwb
           + rel.term(i, [("wb1", (BE,))]) * dw * rel.term(1, (), [("thd", (AL,))]))
    M = rel.term(i * c, (), [("thu", (BE,)), ("thd", (AL,))])
    P = Psi + M + F.ident() * (dw * dbwb * i + dth * c)
    return rel, F, Sdot, Vdot, Cdot, Vform, W, Psi, M, P


def build_perturbation(mode: str = "symbolic", n: int | None = None) -> PerturbationContext:
    """Perturbation objects; the product-form repackagings are verified on construction."""
    if mode not in ("symbolic", "concrete"):
        raise ValueError("mode must be 'symbolic' or 'concrete'")
    if mode == "concrete" and (n is None or n < 2):
        raise ValueError("concrete mode needs n >= 2")
    rel, F, Sdot, Vdot, Cdot, Vform, W, Psi, M, P = symbolic_objects()
    i, c, wb = F.i, F.c, F.wb
    ctx = PerturbationContext(mode, n, rel, F, c, Sdot, Vdot, Cdot, Vform, W, Psi, M, P)

    dw, dbwb, dth = F.dw(), F.dbwb(), F.dtheta()
    sform = W + (Psi + M + F.ident() * (dw * dbwb * i + dth * c)) * (R * c)
    vform = ((rel.term(1, [("w1", (AL,)), ("wb1", (BE,))]) + F.ident() * c) * dw
             + rel.term(c, [("w1", (AL,))], [("thu", (BE,))])) * (-(N + 3) / (N + 2) * i * wb)
    ctx.checks.append(compare("Sform", "curvature form of the perturbation in terms of W, Psi, M", Cdot, sform))
    ctx.checks.append(compare("Vform", "one-form repackaging of the perturbation of V", Vform, vform))

    if mode == "concrete":
        G = GrassmannContext(n)
        br = Bridge(G)
        ctx.G, ctx.bridge = G, br
        Cm, Vm = concrete_objects(G)
        ctx.Cdot_m, ctx.Vform_m = Cm, Vm
        ctx.checks.append(compare(f"Cdot-cross-n{n}", "componentwise curvature form vs specialized symbolic form",
                                  Cm, br.matrix(Cdot)))
        ctx.checks.append(compare(f"Vform-cross-n{n}", "componentwise V form vs specialized symbolic form",
                                  Vm, br.matrix(Vform)))
    return ctx


# ---------------------------------------------------------------------------
# concrete componentwise construction


def tf4_components(u, n: int, zero):
    """Componentwise symmetrize-then-project with h = identity."""
    sym = {}
    for a, b, g, s in product(range(n), repeat=4):
        sym[a, b, g, s] = (u[a, b, g, s] + u[g, b, a, s] + u[a, s, g, b] + u[g, s, a, b]) * Fraction(1, 4)
    t = {}
    for a, b in product(range(n), repeat=2):
        acc = zero
        for m in range(n):
            acc = acc + sym[a, b, m, m]
        t[a, b] = acc
    full = zero
    for m in range(n):
        full = full + t[m, m]
    out = {}
    for a, b, g, s in product(range(n), repeat=4):
        v = sym[a, b, g, s]
        tr1 = zero
        if g == s:
            tr1 = tr1 + t[a, b]
        if a == s:
            tr1 = tr1 + t[g, b]
        if g == b:
            tr1 = tr1 + t[a, s]
        if a == b:
            tr1 = tr1 + t[g, s]
        tr2 = (1 if (a == b and g == s) else 0) + (1 if (a == s and g == b) else 0)
        v = v - tr1 * Fraction(1, n + 2)
        if tr2:
            v = v + full * Fraction(tr2, (n + 1) * (n + 2))
        out[a, b, g, s] = v
    return out


def tf3_components(u, n: int, zero):
    sym = {}
    for a, b, g in product(range(n), repeat=3):
        sym[a, b, g] = (u[a, b, g] + u[g, b, a]) * Fraction(1, 2)
    t = {}
    for g in range(n):
        acc = zero
        for m in range(n):
            acc = acc + sym[m, m, g]
        t[g] = acc
    out = {}
    for a, b, g in product(range(n), repeat=3):
        v = sym[a, b, g]
        if g == b:
            v = v - t[a] * Fraction(1, n + 1)
        if a == b:
            v = v - t[g] * Fraction(1, n + 1)
        out[a, b, g] = v
    return out


def concrete_objects(G: GrassmannContext):
    """Cdot and the V one-form built directly from components a_k, b_k."""
    n = G.n
    zero = ScalarExpr.const(G.table, 0)
    i, wb = G.sym("i"), G.sym("wb")
    u4 = {(a, b, g, s): G.a(a) * G.b(b) * G.a(g) * G.b(s) for a, b, g, s in product(range(n), repeat=4)}
    S = tf4_components(u4, n, zero)
    u3 = {(a, b, g): G.a(a) * G.b(b) * G.a(g) for a, b, g in product(range(n), repeat=3)}
    V = tf3_components(u3, n, zero)
    vpre = i * wb * Fraction(-(n + 3), n + 2)

    def centry(a, b):
        f = G.zero()
        for m, v in product(range(n), repeat=2):
            f = f + (G.up(m) * G.down(v)) * (S[a, b, m, v] * i)
        return f

    def ventry(a, b):
        f = G.zero()
        for m in range(n):
            f = f + G.up(m) * (V[a, b, m] * vpre)
        return f

    return EndoFormMatrix.build(G, centry), EndoFormMatrix.build(G, ventry)


# ---------------------------------------------------------------------------
# closed forms


def closed_form(ctx: PerturbationContext, pieces) -> TensorExpr:
    """Sum of coef * c^cexp * piece * dtheta^dexp; dtheta^(negative) is zero.

    A negative power of c may only carry a zero coefficient.
    """
    rel = ctx.rel
    dth = ctx.F.dtheta()
    free = None
    out = None
    for coef, cexp, piece, dexp in pieces:
        coef = DimRational.coerce(coef)
        free = piece.free
        if coef.is_zero() or dexp < 0:
            continue
        if cexp < 0:
            raise ValueError("negative power of c with a nonzero coefficient")
        term = piece * (dth ** dexp) * (ctx.c ** cexp * coef)
        out = term if out is None else out + term
    return out if out is not None else rel.zero(free or ())


def _pieces(ctx):
    F = ctx.F
    i = F.i
    dd = F.dw() * F.dbwb()
    return {
        "W": ctx.W, "Psi": ctx.Psi, "M": ctx.M,
        "iMdd": ctx.M * dd * i,
        "delta": F.ident(),
        "idelta_dd": F.ident() * dd * i,
        "one": ctx.rel.one(),
        "idd": dd * i,
        "iwb_dw": F.dw() * (i * F.wb),
    }


def psi_power_cf(ctx, k):
    p = _pieces(ctx)
    s = (-1) ** k
    return closed_form(ctx, [
        (s * (k - 1) * (N + 1) ** (k - 2), k - 2, p["W"], k - 1),
        (-s * (N + 1) ** (k - 1), k - 1, p["Psi"], k - 1),
        (s * (N + 1) ** (k - 1), k - 2, p["iMdd"], k - 2),
    ])


def m_power_cf(ctx, k):
    return closed_form(ctx, [((-1) ** (k - 1), k - 1, ctx.M, k - 1)])


def psi_plus_m_cf(ctx, k):
    p = _pieces(ctx)
    s = (-1) ** k
    return closed_form(ctx, [
        (s * (k - 1) * (N + 1) ** (k - 2), k - 2, p["W"], k - 1),
        (-s * (N + 1) ** (k - 1), k - 1, p["Psi"], k - 1),
        (-s, k - 1, p["M"], k - 1),
        (s * ((N + 1) ** (k - 1) - k), k - 2, p["iMdd"], k - 2),
    ])


def p_power_cf(ctx, k):
    p = _pieces(ctx)
    nk = neg_n_pow(k)
    return closed_form(ctx, [
        (1, k, p["delta"], k),
        (k, k - 1, p["idelta_dd"], k - 1),
        (-(nk - 1) / (N + 1), k - 1, p["Psi"], k - 1),
        (1, k - 1, p["M"], k - 1),
        ((nk - 1 + k * (N + 1)) / (N + 1), k - 2, p["iMdd"], k - 2),
        (k * (1 - 2 * neg_n_pow(k - 1)) / (N + 1) + (1 - nk) / (N + 1) ** 2, k - 2, p["W"], k - 1),
    ])


def cdot_power_cf(ctx, k):
    p = _pieces(ctx)
    nk = neg_n_pow(k)
    pre = R ** (k - 1)
    return closed_form(ctx, [
        (pre * R, 2 * k, p["delta"], k),
        (pre * R, 2 * k - 1, p["M"], k - 1),
        (pre * R * k, 2 * k - 1, p["idelta_dd"], k - 1),
        (-pre * (nk - 1) / (N + 2), 2 * k - 1, p["Psi"], k - 1),
        (pre * (nk - 1 + k * (N + 1)) / (N + 2), 2 * k - 2, p["iMdd"], k - 2),
        (pre * (k * (N + 1) + 1) * (1 - nk) / ((N + 1) * (N + 2)), 2 * k - 2, p["W"], k - 1),
    ])


def tr_cdot_power_cf(ctx, k):
    p = _pieces(ctx)
    base = R ** k * (N + neg_n_pow(k))
    return closed_form(ctx, [
        (base, 2 * k, p["one"], k),
        (base * k, 2 * k - 1, p["idd"], k - 1),
    ])


def tr_cdot_v_cf(ctx, k):
    p = _pieces(ctx)
    return closed_form(ctx, [
        (-(R ** k) * (N + 3) * (N + neg_n_pow(k)) / (N + 1), 2 * k - 1, p["iwb_dw"], k - 1),
    ])


# ---------------------------------------------------------------------------
# suites


def product_table_cases(ctx: PerturbationContext) -> list[CaseResult]:
    """Pairwise products and traces of W, Psi, M, and the V one-form."""
    F, c, i = ctx.F, ctx.c, ctx.F.i
    W, Psi, M = ctx.W, ctx.Psi, ctx.M
    dth, dw, dbwb = F.dtheta(), F.dw(), F.dbwb()
    dd = dw * dbwb
    n1 = N + 1
    zero = ctx.rel.zero([(AL, "d"), (BE, "u")])
    zs = ctx.rel.zero()
    V = ctx.Vform
    cases = [
        ("Psi.Psi", matmul(Psi, Psi), W * dth + Psi * dth * (-n1 * c) + M * dd * (n1 * i)),
        ("Psi.M", matmul(Psi, M), M * dd * (-i)),
        ("M.Psi", matmul(M, Psi), M * dd * (-i)),
        ("M.M", matmul(M, M), M * dth * (-c)),
        ("W.W", matmul(W, W), zero),
        ("W.Psi", matmul(W, Psi), W * dth * (-n1 * c)),
        ("Psi.W", matmul(Psi, W), W * dth * (-n1 * c)),
        ("W.M", matmul(W, M), zero),
        ("M.W", matmul(M, W), zero),
        ("W^dw", W * dw, ctx.rel.zero(W.free)),
        ("W^dbwb", W * dbwb, ctx.rel.zero(W.free)),
        ("iPsi^dd", Psi * dd * i, W * dth),
        ("tr-W", ctxmod.trace(W), dd * (-n1 * i * c)),
        ("tr-M", ctxmod.trace(M), dth * c),
        ("tr-Psi", ctxmod.trace(Psi), dth * (-n1 * c) + dd * (2 * i)),
        ("tr-V", ctxmod.trace(V), zs),
        ("tr-W.V", ctxmod.trace(matmul(W, V)), zs),
        ("tr-M.V", ctxmod.trace(matmul(M, V)), zs),
        ("tr-Psi.V", ctxmod.trace(matmul(Psi, V)),
         dw * dth * (-(N * n1 * (N + 3)) / (N + 2) * i * c ** 2 * F.wb)),
        ("W.P=P.W", matmul(W, ctx.P), matmul(ctx.P, W)),
    ]
    out = []
    for cid, actual, expected in cases:
        with timed() as tm:
            res = compare(cid, "product table of the perturbation building blocks", actual, expected)
        res.wall_time = tm["t"]
        out.append(res)
    return out


def symmetry_cases(ctx: PerturbationContext) -> list[CaseResult]:
    S = ctx.Sdot
    swap_ag = S.relabel({AL: "ga", "ga": AL})
    swap_bs = S.relabel({BE: "si", "si": BE})
    herm = S.conjugate().relabel({AL: BE, BE: AL, "ga": "si", "si": "ga"})
    V = ctx.Vdot
    return [
        compare("Sdot-sym-al-ga", "Chern symmetries of the perturbation", swap_ag, S),
        compare("Sdot-sym-be-si", "Chern symmetries of the perturbation", swap_bs, S),
        compare("Sdot-hermitian", "Chern symmetries of the perturbation", herm, S),
        compare("Sdot-trace-al-be", "trace-free perturbation", S.contract(AL, BE), ctx.rel.zero([("ga", "d"), ("si", "u")])),
        compare("Sdot-trace-al-si", "trace-free perturbation", S.contract(AL, "si"), ctx.rel.zero([("ga", "d"), (BE, "u")])),
        compare("Vdot-sym", "symmetry of the V perturbation", V.relabel({AL: "ga", "ga": AL}), V),
        compare("Vdot-trace-al-be", "trace-free V perturbation", V.contract(AL, BE), ctx.rel.zero([("ga", "d")])),
        compare("Vdot-trace-ga-be", "trace-free V perturbation", V.contract("ga", BE), ctx.rel.zero([(AL, "d")])),
    ]


def divergence_case(ctx: PerturbationContext) -> CaseResult:
    """Holomorphic derivative of Sdot contracted into its last slot equals -n i Vdot."""
    with timed() as tm:
        dS = derive(ctx.Sdot, HOL, "x").contract("x", "si")
        expected = ctx.Vdot * (-N * ctx.F.i)
        res = compare("divS", "divergence of the Chern tensor against V", dS, expected)
    res.wall_time = tm["t"]
    return res


def power_suite(ctx: PerturbationContext, kmax: int = 6) -> list[CaseResult]:
    """Psi^k, M^k, (Psi+M)^k, P^k, Cdot^k, tr Cdot^k, tr Cdot^(k-1) V for k = 1..kmax."""
    out = []
    Psi, M, P, C = ctx.Psi, ctx.M, ctx.P, ctx.Cdot
    PM = Psi + M
    pows = {"Psi": Psi, "M": M, "PM": PM, "P": P, "C": C}
    ident = ctx.F.ident()
    Cprev = ident
    for k in range(1, kmax + 1):
        if k > 1:
            for key, base in (("Psi", Psi), ("M", M), ("PM", PM), ("P", P), ("C", C)):
                pows[key] = matmul(pows[key], base)
        with timed() as tm:
            rows = []
            if k >= 2:
                rows.append((f"Psi^{k}", pows["Psi"], psi_power_cf(ctx, k), "powers of Psi"))
                rows.append((f"M^{k}", pows["M"], m_power_cf(ctx, k), "powers of M"))
            rows.append((f"(Psi+M)^{k}", pows["PM"], psi_plus_m_cf(ctx, k), "powers of Psi+M"))
            rows.append((f"P^{k}", pows["P"], p_power_cf(ctx, k), "powers of the shifted form P"))
            rows.append((f"Cdot^{k}", pows["C"], cdot_power_cf(ctx, k), "powers of the perturbed curvature form"))
            rows.append((f"tr-Cdot^{k}", ctxmod.trace(pows["C"]), tr_cdot_power_cf(ctx, k),
                         "trace of powers of the perturbed curvature form"))
            trcv = ctxmod.trace(matmul(Cprev, ctx.Vform))
            rows.append((f"tr-Cdot^{k - 1}V", trcv, tr_cdot_v_cf(ctx, k),
                         "mixed trace with the V one-form"))
        for cid, actual, expected, anchor in rows:
            res = compare(cid, anchor, actual, expected)
            res.wall_time = tm["t"] / len(rows)
            out.append(res)
        Cprev = pows["C"]
    return out


def cross_backend_cases(n: int, kmax: int = 3) -> list[CaseResult]:
    """tr Cdot^k by concrete matrix powers vs the specialized symbolic closed form."""
    ctx = build_perturbation("concrete", n)
    out = list(ctx.checks)
    Ck = None
    for k in range(1, kmax + 1):
        Ck = ctx.Cdot_m if Ck is None else Ck @ ctx.Cdot_m
        expected = ctx.bridge.form(tr_cdot_power_cf(ctx, k))
        out.append(compare(f"tr-Cdot^{k}-n{n}", "trace of powers, concrete vs symbolic", trace(Ck), expected))
    return out


def run_symbolic_suite(kmax: int = 6) -> SuiteReport:
    rep = SuiteReport("perturbation-symbolic")
    ctx = build_perturbation("symbolic")
    rep.extend(ctx.checks)
    rep.extend(symmetry_cases(ctx))
    rep.add(divergence_case(ctx))
    rep.extend(product_table_cases(ctx))
    rep.extend(power_suite(ctx, kmax))
    return rep
