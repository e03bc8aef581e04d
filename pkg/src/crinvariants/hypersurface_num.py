"""Floating-point Chern tensor of a real hypersurface from its defining function.

Families are given by a defining function rho, positive inside, with closed-form
Wirtinger derivatives up to order four.  The Chern tensor is evaluated in the
frame Z_a = d_a - (rho_a / rho_p) d_p (p the pivot coordinate with the largest
|rho_p|) from the Reiter-Son curvature expression applied to -rho, which makes
the Levi form h = D(-rho) positive definite and agrees with the Levi form of
theta = Im dbar(rho).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations, product
from math import factorial, gamma, pi
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import cho_factor, cho_solve, solve, solve_triangular
from scipy.optimize import brentq

# ---------------------------------------------------------------------------
# families


@dataclass
class Jet:
    """Wirtinger derivatives of a real function at a point of C^(n+1).

    d1[j] = d_j rho, hb[j,k] = d_j dbar_k rho, hh[j,k] = d_j d_k rho,
    d3[a,b,k] = d_a d_b dbar_k rho, d4[a,b,c,d] = d_a dbar_b d_c dbar_d rho.
    """
    value: float
    d1: np.ndarray
    hb: np.ndarray
    hh: np.ndarray
    d3: np.ndarray
    d4: np.ndarray

    def negated(self) -> "Jet":
        return Jet(-self.value, -self.d1, -self.hb, -self.hh, -self.d3, -self.d4)


@dataclass
class HypersurfaceFamily:
    name: str
    params: dict
    value: Callable[[np.ndarray, dict], float]
    jet_fn: Callable[[np.ndarray, dict], Jet]

    def jet(self, z: np.ndarray, **over) -> Jet:
        p = dict(self.params, **over)
        return self.jet_fn(np.asarray(z, dtype=complex), p)

    def rho(self, z: np.ndarray, **over) -> float:
        p = dict(self.params, **over)
        return self.value(np.asarray(z, dtype=complex), p)

    def with_params(self, **over) -> "HypersurfaceFamily":
        return HypersurfaceFamily(self.name, dict(self.params, **over), self.value, self.jet_fn)


def _zeros(N):
    return (np.zeros((N, N), complex), np.zeros((N, N), complex),
            np.zeros((N, N, N), complex), np.zeros((N, N, N, N), complex))


def _quartic_sphere_value(z, p):
    w = z[0]
    return float(1 - np.vdot(z, z).real + p.get("t", 0.0) / 4 * abs(w) ** 4 - p.get("s", 0.0) * (w * w).real)


def _quartic_sphere_jet(z, p):
    # rho = 1 - |z|^2 + (t/4)|w|^4 - s Re(w^2), w = z[0]
    N = len(z)
    t, s = p.get("t", 0.0), p.get("s", 0.0)
    w, wb = z[0], np.conj(z[0])
    hh, hb, d3, d4 = _zeros(N)
    d1 = -np.conj(z).astype(complex)
    d1[0] += t / 2 * w * wb ** 2 - s * w
    hb -= np.eye(N)
    hb[0, 0] += t * w * wb
    hh[0, 0] += t / 2 * wb ** 2 - s
    d3[0, 0, 0] = t * wb
    d4[0, 0, 0, 0] = t
    return Jet(_quartic_sphere_value(z, p), d1, hb, hh, d3, d4)


def _tube_value(z, p):
    return float(0.5 - 2 * np.sum(z.real ** 2))


def _tube_jet(z, p):
    # rho = 1/2 - (1/2) sum (z_j + zbar_j)^2
    N = len(z)
    hh, hb, d3, d4 = _zeros(N)
    d1 = -2 * z.real.astype(complex)
    hb -= np.eye(N)
    hh -= np.eye(N)
    return Jet(_tube_value(z, p), d1, hb, hh, d3, d4)


def sphere(n: int) -> HypersurfaceFamily:
    return HypersurfaceFamily("sphere", {"n": n, "t": 0.0, "s": 0.0}, _quartic_sphere_value, _quartic_sphere_jet)


def perturbed_sphere(n: int, t: float = 0.0) -> HypersurfaceFamily:
    """1 - |z|^2 + (t/4)|z_0|^4 (z_0 plays the role of w)."""
    return HypersurfaceFamily("perturbed-sphere", {"n": n, "t": t, "s": 0.0}, _quartic_sphere_value, _quartic_sphere_jet)


def real_ellipsoid(n: int, s: float = 0.0) -> HypersurfaceFamily:
    """1 - |z|^2 - s Re(z_0^2)."""
    return HypersurfaceFamily("real-ellipsoid", {"n": n, "t": 0.0, "s": s}, _quartic_sphere_value, _quartic_sphere_jet)


def reinhardt_tube(n: int) -> HypersurfaceFamily:
    """1/2 - 2 sum (Re z_j)^2, the log-coordinates cover of the Reinhardt boundary."""
    return HypersurfaceFamily("reinhardt-tube", {"n": n, "r": 1.0}, _tube_value, _tube_jet)


def rotated(fam: HypersurfaceFamily, U: np.ndarray) -> HypersurfaceFamily:
    """The family rho(U z) for a constant unitary U."""
    U = np.asarray(U, dtype=complex)

    def value(z, p):
        return fam.value(U @ z, p)

    def jet_fn(z, p):
        J = fam.jet_fn(U @ z, p)
        Ub = np.conj(U)
        return Jet(J.value,
                   U.T @ J.d1,
                   np.einsum("ja,kb,jk->ab", U, Ub, J.hb),
                   np.einsum("ja,kb,jk->ab", U, U, J.hh),
                   np.einsum("ia,jb,kc,ijk->abc", U, U, Ub, J.d3),
                   np.einsum("ia,jb,kc,ld,ijkl->abcd", U, Ub, U, Ub, J.d4))

    return HypersurfaceFamily(fam.name + "-rotated", dict(fam.params), value, jet_fn)


def jet_self_test(fam: HypersurfaceFamily, z: np.ndarray, h: float = 1e-4, tol: float = 1e-6) -> float:
    """Max discrepancy between closed-form jets and central differences of lower orders."""
    z = np.asarray(z, dtype=complex)
    N = len(z)

    def wirtinger(f, k):
        # returns (d_k f, dbar_k f) by central differences in x_k and y_k
        e = np.zeros(N, complex)
        e[k] = h
        fx = (f(z + e) - f(z - e)) / (2 * h)
        fy = (f(z + 1j * e) - f(z - 1j * e)) / (2 * h)
        return 0.5 * (fx - 1j * fy), 0.5 * (fx + 1j * fy)

    J = fam.jet(z)
    err = 0.0
    for k in range(N):
        d, db = wirtinger(lambda q: fam.rho(q), k)
        err = max(err, abs(d - J.d1[k]))
        d, db = wirtinger(lambda q: fam.jet(q).d1, k)
        err = max(err, np.max(np.abs(db - J.hb[:, k])), np.max(np.abs(d - J.hh[:, k])))
        d, db = wirtinger(lambda q: fam.jet(q).hh, k)
        err = max(err, np.max(np.abs(db - J.d3[:, :, k])))
        d, db = wirtinger(lambda q: fam.jet(q).d3, k)
        # dbar_k of d3[a, c, b] = d_a d_c dbar_b is d4[a, b, c, k]
        err = max(err, np.max(np.abs(db.transpose(0, 2, 1) - J.d4[:, :, :, k])))
    if err > tol:
        raise AssertionError(f"{fam.name}: jet mismatch {err:.3e}")
    return err


# ---------------------------------------------------------------------------
# frame and Chern tensor


class DegenerateFrame(ValueError):
    pass


@dataclass
class FramePoint:
    point: np.ndarray
    pivot: int
    Z: np.ndarray            # n x (n+1): Z[a, j] components of Z_a
    h: np.ndarray            # Levi form h_{a bbar}
    xi: np.ndarray           # transverse field components
    jet: Jet = field(repr=False, default=None)


def frame_at(fam: HypersurfaceFamily, z: np.ndarray, pivot: int | None = None, tol: float = 1e-12) -> FramePoint:
    J = fam.jet(z).negated()  # Reiter-Son convention: negative inside
    N = len(z)
    if abs(J.value) > 1e-10:
        raise ValueError(f"point is not on the hypersurface (rho = {J.value:.3e})")
    if pivot is None:
        pivot = int(np.argmax(np.abs(J.d1)))
    if abs(J.d1[pivot]) < 1e-8:
        raise DegenerateFrame("gradient vanishes at the point")
    others = [j for j in range(N) if j != pivot]
    Z = np.zeros((N - 1, N), complex)
    for a, j in enumerate(others):
        Z[a, j] = 1.0
        Z[a, pivot] = -J.d1[j] / J.d1[pivot]
    h = Z @ J.hb @ Z.conj().T
    try:
        cho_factor(h)
    except np.linalg.LinAlgError:
        raise DegenerateFrame("Levi form is not positive definite") from None
    # xi: H^T xi = lambda conj(d1), d1 . xi = 1
    v = np.linalg.solve(J.hb.T, np.conj(J.d1))
    xi = v / (J.d1 @ v)
    return FramePoint(np.asarray(z, complex), pivot, Z, h, xi, J)


def tf4_numeric(u: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Totally trace-free part with respect to h (indices a, bbar, c, dbar)."""
    n = h.shape[0]
    cf = cho_factor(h)
    hinv = cho_solve(cf, np.eye(n))        # hinv[b, a] = h^{a bbar}
    u = 0.25 * (u + u.transpose(2, 1, 0, 3) + u.transpose(0, 3, 2, 1) + u.transpose(2, 3, 0, 1))
    t = np.einsum("abcd,dc->ab", u, hinv)  # u_{a bbar c}^c
    full = np.einsum("ab,ba->", t, hinv)
    corr = (np.einsum("ab,cd->abcd", t, h) + np.einsum("cb,ad->abcd", t, h)
            + np.einsum("ad,cb->abcd", t, h) + np.einsum("cd,ab->abcd", t, h))
    pure = np.einsum("ab,cd->abcd", h, h) + np.einsum("ad,cb->abcd", h, h)
    return u - corr / (n + 2) + full * pure / ((n + 1) * (n + 2))


@dataclass
class NumericChern:
    S: np.ndarray
    raw: np.ndarray
    h: np.ndarray
    frame: FramePoint = field(repr=False, default=None)

    def raised(self) -> np.ndarray:
        """S_b^a_d^c as an array [b, a, d, c] (second and fourth slots raised)."""
        hinv = cho_solve(cho_factor(self.h), np.eye(self.h.shape[0]))  # hinv[b, a] = h^{a bbar}
        return np.einsum("bxdy,xa,yc->badc", self.S, hinv, hinv)

    def trace_residual(self) -> float:
        hinv = cho_solve(cho_factor(self.h), np.eye(self.h.shape[0]))
        scale = max(np.max(np.abs(self.raw)), 1e-300)
        r = [np.einsum("abcd,ba->cd", self.S, hinv), np.einsum("abcd,da->cb", self.S, hinv),
             np.einsum("abcd,bc->ad", self.S, hinv), np.einsum("abcd,dc->ab", self.S, hinv)]
        return max(np.max(np.abs(x)) for x in r) / scale

    def symmetry_residual(self) -> float:
        S = self.S
        scale = max(np.max(np.abs(self.raw)), 1e-300)
        r = [S - S.transpose(2, 1, 0, 3), S - S.transpose(0, 3, 2, 1),
             S - np.conj(S.transpose(1, 0, 3, 2))]
        return max(np.max(np.abs(x)) for x in r) / scale


def _her_solve(H: np.ndarray, B: np.ndarray) -> np.ndarray:
    """X[k, ...] = sum_j (H^-1)[k, j] B[..., j] for Hermitian H."""
    rhs = np.moveaxis(B, -1, 0)
    X = solve(H, rhs.reshape(H.shape[0], -1), assume_a="her")
    return X.reshape(rhs.shape)


def chern_tensor_at(fam: HypersurfaceFamily, p: np.ndarray, pivot: int | None = None, **params) -> NumericChern:
    if params:
        fam = fam.with_params(**params)
    F = frame_at(fam, p, pivot)
    J = F.jet
    Z, Zb = F.Z, np.conj(F.Z)
    R4 = np.einsum("abcd,xa,yb,zc,wd->xyzw", J.d4, Z, Zb, Z, Zb)
    Dac_k = np.einsum("abk,xa,zb->xzk", J.d3, Z, Z)   # D_{ac}(rho_kbar)
    Dbd_j = np.conj(Dac_k)                             # D_{bbar dbar}(rho_j)
    h_ac = Z @ J.hh @ Z.T
    h_bd = np.conj(h_ac)
    xi = F.xi
    xinorm = float(np.real(xi @ J.hb @ np.conj(xi)))
    raw = (R4
           + np.einsum("xzk,kyw->xyzw", Dac_k, _her_solve(J.hb, Dbd_j))
           + np.einsum("yw,k,xzk->xyzw", h_bd, np.conj(xi), Dac_k)
           + np.einsum("xz,j,ywj->xyzw", h_ac, xi, Dbd_j)
           - xinorm * np.einsum("xz,yw->xyzw", h_ac, h_bd))
    S = tf4_numeric(raw, F.h)
    return NumericChern(S, raw, F.h, F)


def frame_transition(F_from: FramePoint, F_to: FramePoint, U: np.ndarray) -> np.ndarray:
    """G with U Z_from = G Z_to, where U maps the first point to the second."""
    pushed = (U @ F_from.Z.T).T
    G, res, *_ = np.linalg.lstsq(F_to.Z.T, pushed.T, rcond=None)
    if np.max(np.abs(F_to.Z.T @ G - pushed.T)) > 1e-9:
        raise ArithmeticError("pushed frame does not lie in the holomorphic tangent space")
    return G.T


def transport(S: np.ndarray, G: np.ndarray) -> np.ndarray:
    Gb = np.conj(G)
    return np.einsum("xa,yb,zc,wd,abcd->xyzw", G, Gb, G, Gb, S)


def covariance_residual(fam: HypersurfaceFamily, U: np.ndarray, q: np.ndarray,
                        source: HypersurfaceFamily | None = None) -> float:
    """Compare S at q with S of rho(U .) at U^-1 q carried over by U.

    ``source`` defaults to the rotated family; pass ``fam`` itself when U is a
    symmetry of rho, so that both tensors come from the same defining function.
    """
    U = np.asarray(U, complex)
    src = rotated(fam, U) if source is None else source
    q0 = np.linalg.solve(U, q)
    C_to = chern_tensor_at(fam, q)
    C_from = chern_tensor_at(src, q0)
    G = frame_transition(C_from.frame, C_to.frame, U)
    scale = max(np.max(np.abs(C_to.S)), 1.0)
    return float(max(np.max(np.abs(transport(C_to.S, G) - C_from.S)),
                     np.max(np.abs(G @ C_to.h @ G.conj().T - C_from.h))) / scale)


# ---------------------------------------------------------------------------
# scalar invariants


def _perm_sign(p) -> int:
    s = 1
    p = list(p)
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                s = -s
    return s


def cycle_type(p) -> tuple:
    n = len(p)
    seen = [False] * n
    counts = [0] * n
    for i in range(n):
        if not seen[i]:
            L, j = 0, i
            while not seen[j]:
                seen[j] = True
                j = p[j]
                L += 1
            counts[L - 1] += 1
    return tuple(counts)


def phi_class(sigma: Sequence[int]) -> list:
    k = len(sigma)
    return [p for p in permutations(range(k)) if cycle_type(p) == tuple(sigma)]


_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def _einsum_out(subs: list, ops: list, outs: list, n: int, dtype):
    """einsum with an output list that may repeat labels (repeats become deltas)."""
    used = set("".join(subs)) | set(outs)
    fresh = (l for l in _LETTERS if l not in used)
    subs, ops, fixed = list(subs), list(ops), []
    for pos, lab in enumerate(outs):
        if lab in outs[:pos]:
            new = next(fresh)
            subs.append(lab + new)
            ops.append(np.eye(n, dtype=dtype))
            fixed.append(new)
        else:
            fixed.append(lab)
    if not subs:
        return np.ones((), dtype=dtype)
    return np.einsum(",".join(subs) + "->" + "".join(fixed), *ops)


def _inverse(p) -> list:
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return inv


def delta_phi_contract(Sr: np.ndarray, sigma: Sequence[int], free: str = "none") -> np.ndarray:
    """Generalized Kronecker delta times Phi contracted against copies of S.

    ``Sr[b, a, d, c]`` holds S_b^a_d^c and m = len(sigma).  The delta is
    sum_pi sgn(pi) prod_j delta_{a_j}^{b_pi(j)}, and Phi is
    sum_{tau in class(sigma)} prod_j delta_{c_j}^{d_tau(j)}.

    free="none":  all m pairs carry a copy of S                   -> scalar c_Phi(S)
    free="first": pair 0 is left open                             -> array [a0, b0, c0, d0]
    free="extra": an additional open delta pair in front of m copies -> array [a0, b0]
    """
    m = len(sigma)
    n = Sr.shape[0]
    cls = phi_class(sigma)
    B = _LETTERS[:m + 1]
    D = _LETTERS[m + 1:2 * m + 1]
    dt = Sr.dtype
    if free == "none":
        out = np.zeros((), dt)
        for pi in permutations(range(m)):
            sg = _perm_sign(pi)
            for tau in cls:
                subs = [B[j] + B[pi[j]] + D[j] + D[tau[j]] for j in range(m)]
                out = out + sg * np.einsum(",".join(subs) + "->", *[Sr] * m)
        return out
    if free == "first":
        out = np.zeros((n,) * 4, dt)
        for pi in permutations(range(m)):
            sg = _perm_sign(pi)
            for tau in cls:
                subs = [B[j] + B[pi[j]] + D[j] + D[tau[j]] for j in range(1, m)]
                outs = [B[pi[0]], B[0], D[tau[0]], D[0]]
                out = out + sg * _einsum_out(subs, [Sr] * (m - 1), outs, n, dt)
        return out
    if free == "extra":
        out = np.zeros((n, n), dt)
        for pi in permutations(range(m + 1)):
            sg = _perm_sign(pi)
            for tau in cls:
                subs = [B[j] + B[pi[j]] + D[j - 1] + D[tau[j - 1]] for j in range(1, m + 1)]
                out = out + sg * _einsum_out(subs, [Sr] * m, [B[pi[0]], B[0]], n, dt)
        return out
    raise ValueError("free must be 'none', 'first' or 'extra'")


def c_phi_contraction(Sr: np.ndarray, sigma: Sequence[int]):
    """c_Phi(S) as a full delta/Phi contraction, normalized like the trace-polynomial route."""
    return delta_phi_contract(Sr, sigma) / len(phi_class(sigma))


def orthonormal_raised(C: NumericChern) -> np.ndarray:
    """S_b^a_d^c in a frame where h is the identity (then it is just S_{b abar d cbar})."""
    n = C.h.shape[0]
    G = solve_triangular(np.linalg.cholesky(C.h), np.eye(n), lower=True)   # Z' = G Z has h' = I
    Gb = np.conj(G)
    return np.einsum("xa,yb,zc,wd,abcd->xyzw", G, Gb, G, Gb, C.S)


class _NumForm:
    """Minimal numeric exterior algebra on 2n generators theta^1..n, theta_1..n."""

    __slots__ = ("t",)

    def __init__(self, t=None):
        self.t = t or {}

    def __add__(self, o):
        out = dict(self.t)
        for m, c in o.t.items():
            out[m] = out.get(m, 0) + c
        return _NumForm(out)

    def __mul__(self, o):
        if not isinstance(o, _NumForm):
            return _NumForm({m: c * o for m, c in self.t.items()})
        out = {}
        for m1, c1 in self.t.items():
            for m2, c2 in o.t.items():
                if m1 & m2:
                    continue
                s, m = 0, m2
                while m:
                    low = m & -m
                    s += bin(m1 & ~((low << 1) - 1)).count("1")
                    m ^= low
                out[m1 | m2] = out.get(m1 | m2, 0) + (-c1 * c2 if s & 1 else c1 * c2)
        return _NumForm(out)


def scalar_invariant_grassmann(Sr: np.ndarray, sigma: Sequence[int]) -> complex:
    """c_Phi(S) from c_Phi(i S theta^mu theta_nu) = (1/n!) c_Phi(S) dtheta^n with h = I."""
    n = Sr.shape[0]
    up = lambda m: _NumForm({1 << m: 1.0})
    dn = lambda m: _NumForm({1 << (n + m): 1.0})
    C = [[_NumForm() for _ in range(n)] for _ in range(n)]
    for a, b, mu, nu in product(range(n), repeat=4):
        v = Sr[a, b, mu, nu]
        if v != 0:
            C[a][b] = C[a][b] + (up(mu) * dn(nu)) * (1j * v)
    dth = _NumForm()
    for g in range(n):
        dth = dth + (up(g) * dn(g)) * 1j
    # traces of powers
    P = C
    traces = []
    for k in range(1, n + 1):
        if k > 1:
            P = [[sum((P[a][g] * C[g][b] for g in range(n)), _NumForm()) for b in range(n)] for a in range(n)]
        traces.append(sum((P[a][a] for a in range(n)), _NumForm()))
    f = _NumForm({0: 1.0})
    for k, s in enumerate(sigma, start=1):
        for _ in range(s):
            f = f * traces[k - 1]
    top = (1 << (2 * n)) - 1
    ref = _NumForm({0: 1.0})
    for _ in range(n):
        ref = ref * dth
    return factorial(n) * f.t.get(top, 0) / ref.t[top]


def scalar_invariant_at(fam: HypersurfaceFamily, p: np.ndarray, sigma: Sequence[int],
                        route: str = "grassmann", **params) -> float:
    C = chern_tensor_at(fam, p, **params)
    Sr = orthonormal_raised(C)
    if route == "grassmann":
        val = scalar_invariant_grassmann(Sr, sigma)
    elif route == "contraction":
        val = c_phi_contraction(Sr, sigma)
    else:
        raise ValueError("route must be 'grassmann' or 'contraction'")
    if abs(val.imag) > 1e-9 * max(1.0, abs(val)):
        raise ArithmeticError(f"invariant is not real: {val}")
    return float(val.real)


# ---------------------------------------------------------------------------
# perturbation finite differences


def radial_point(fam: HypersurfaceFamily, direction: np.ndarray, **params) -> np.ndarray:
    """The point s*direction on the hypersurface, s > 0 (the zero set is star-shaped)."""
    u = np.asarray(direction, complex)
    u = u / np.linalg.norm(u)
    f = lambda s: fam.rho(s * u, **params)
    return brentq(f, 0.5, 1.5, xtol=1e-15, rtol=1e-15) * u


def c_from_frame(fam: HypersurfaceFamily, p: np.ndarray) -> float:
    """c = -(1/(n+1)) w_g conj(w)^g with w = z_0 and w_g = Z_g(w)."""
    F = frame_at(fam, p)
    n = F.h.shape[0]
    wg = F.Z[:, 0]
    val = np.conj(wg) @ cho_solve(cho_factor(F.h), wg)
    return float((-val / (n + 1)).real)


@dataclass
class FDReport:
    point: np.ndarray
    c: float
    expected: float
    estimate: float
    table: list
    rel_error: float
    note: str = ("points are tracked by radial projection; the invariant is O(t^n) uniformly, "
                 "so its n-th t-derivative at t = 0 does not depend on how points are matched")


def perturbation_fd_check(n: int, sigma: Sequence[int], direction: np.ndarray, step: float = 1e-2,
                          route: str = "grassmann") -> FDReport:
    """n-th t-derivative of c_Phi(S^t) at t = 0 by Richardson-extrapolated central differences."""
    if n != 2:
        raise NotImplementedError("finite differences are implemented for n = 2 (second derivative)")
    from .symkernel import p_varsigma  # local import keeps the numeric layer light
    fam = perturbed_sphere(n)
    p0 = radial_point(fam, direction, t=0.0)
    c = c_from_frame(fam.with_params(t=0.0), p0)

    def f(t):
        if t == 0:
            return 0.0
        q = radial_point(fam, direction, t=t)
        return scalar_invariant_at(fam, q, sigma, route=route, t=t)

    table = []
    D = []
    for h in (step, step / 2):
        d2 = (f(h) - 2 * f(0.0) + f(-h)) / h ** 2
        table.append((h, d2))
        D.append(d2)
    est = (4 * D[1] - D[0]) / 3
    pv = float(p_varsigma(sigma).evaluate(n))
    expected = -(factorial(n) ** 2) * n * ((n + 1) / (n + 2)) ** n * pv * c ** (2 * n)
    return FDReport(p0, c, expected, est, table, abs(est - expected) / abs(expected))


def scaling_slope(n: int, sigma: Sequence[int], direction: np.ndarray,
                  ts: Sequence[float] = (1e-2, 5e-3, 2.5e-3)) -> float:
    fam = perturbed_sphere(n)
    vals = []
    for t in ts:
        q = radial_point(fam, direction, t=t)
        vals.append(abs(scalar_invariant_at(fam, q, sigma, t=t)))
    return float(np.polyfit(np.log(ts), np.log(vals), 1)[0])


# ---------------------------------------------------------------------------
# volume


def unit_sphere_volume(n: int) -> float:
    """Volume of the unit n-sphere in R^(n+1)."""
    return 2 * pi ** ((n + 1) / 2) / gamma((n + 1) / 2)


def _sphere_point_and_tangents(phi: np.ndarray, radius: float):
    """Hyperspherical embedding of S^n(radius) and its angle derivatives.

    ``phi`` has shape (..., n); returns x (..., n+1) and dx (..., n, n+1) with
    dx[..., m, j] = d x_j / d phi_m.
    """
    phi = np.asarray(phi, float)
    n = phi.shape[-1]
    s, c = np.sin(phi), np.cos(phi)
    one = np.ones(phi.shape[:-1])
    last = lambda j, f: f[..., j] if j < n else one
    x = np.empty(phi.shape[:-1] + (n + 1,))
    dx = np.zeros(phi.shape[:-1] + (n, n + 1))
    for j in range(n + 1):
        prod_s = np.prod(s[..., :j], axis=-1)
        x[..., j] = radius * prod_s * last(j, c)
        for m in range(min(j + 1, n)):
            if m < j:
                f = np.prod(np.where(np.arange(j) == m, c[..., :j], s[..., :j]), axis=-1)
                dx[..., m, j] = radius * f * last(j, c)
            else:  # m == j < n
                dx[..., m, j] = -radius * prod_s * s[..., j]
    return x, dx


def volume_quadrature(n: int, r: float = 1.0, resolution: int = 24) -> float:
    """Integral of theta ^ dtheta^n over one fundamental domain of the Reinhardt boundary.

    theta = 2 sum x_j dy_j on {|x| = 1/2} x [0, pi/r)^(n+1).  The pulled-back
    density in (phi, y) is 2^(n+1) n! |det[x, dx/dphi]|.  Gauss-Legendre in the
    polar angles, trapezoid in the azimuth.  Summation order is fixed (one
    polar slab at a time), so the result is deterministic.
    """
    if n < 1 or r <= 0:
        raise ValueError("need n >= 1 and r > 0")
    gl_x, gl_w = np.polynomial.legendre.leggauss(resolution)
    polar = 0.5 * pi * (gl_x + 1)
    polar_w = 0.5 * pi * gl_w
    az = 2 * pi * np.arange(2 * resolution) / (2 * resolution)
    az_w = np.full(2 * resolution, 2 * pi / (2 * resolution))
    nodes = [polar] * (n - 1) + [az]
    weights = [polar_w] * (n - 1) + [az_w]
    # slab over the first angle keeps memory bounded
    if n > 1:
        rest_nodes = np.stack(np.meshgrid(*nodes[1:], indexing="ij"), axis=-1).reshape(-1, n - 1)
    else:
        rest_nodes = np.zeros((1, 0))
    rest_w = np.ones(1)
    for w in weights[1:]:
        rest_w = np.multiply.outer(rest_w, w).ravel()
    sphere_int = 0.0
    for phi0, w0 in zip(nodes[0], weights[0]):
        phi = np.concatenate([np.full((len(rest_nodes), 1), phi0), rest_nodes], axis=1)
        x, dx = _sphere_point_and_tangents(phi, 0.5)
        dets = np.abs(np.linalg.det(np.concatenate([x[:, None, :], dx], axis=1)))
        sphere_int += w0 * float(np.dot(rest_w, dets))
    # the density does not depend on y, so the torus factor is its volume
    torus = (pi / r) ** (n + 1)
    return 2 ** (n + 1) * factorial(n) * sphere_int * torus


def volume_closed_form(n: int, r: float = 1.0) -> float:
    return factorial(n) * (pi / r) ** (n + 1) * unit_sphere_volume(n)
