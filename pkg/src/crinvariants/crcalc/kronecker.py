"""Vanishing of the (n+1)-fold generalized Kronecker delta contracted with Phi and S.

U_a^b = delta^{b b1..bn}_{a a1..an} Phi^{d1..dn}_{c1..cn} prod_j S_{bj}^{aj}_{dj}^{cj}
vanishes in dimension n, which gives c_Phi(S) delta_a^r = n Sym^Phi_a^b_c^d S_b^r_d^c.

Tensors are random Gaussian rationals with the Chern symmetries, cleared of
denominators, so float einsum sums stay exact as long as every partial sum is
below 2^53; that bound is checked before contracting.
"""
from __future__ import annotations

from math import factorial

import numpy as np

from ..exterior import InvariantPolynomial
from ..hypersurface_num import delta_phi_contract, phi_class
from .report import CaseResult, SuiteReport, timed

EXACT_LIMIT = 2 ** 53


def random_chern_like(n: int, rng: np.random.Generator, bound: int = 3, maxden: int = 4):
    """Random rational tensor with S_{a b c d} = S_{c b a d} = S_{a d c b} = conj(S_{b a d c}).

    Returns (integer array, denominator): the tensor is array / denominator.
    Both sides of every checked identity are homogeneous of degree n in S, so
    the integer array can stand in for S.
    """
    shape = (n,) * 4
    num = rng.integers(-bound, bound + 1, size=(2,) + shape)
    den = rng.integers(1, maxden + 1, size=(2,) + shape)
    L = int(np.lcm.reduce(den.ravel()))
    T = (num[0] * (L // den[0])) + 1j * (num[1] * (L // den[1]))
    T = T + T.transpose(2, 1, 0, 3)
    T = T + T.transpose(0, 3, 2, 1)
    T = T + np.conj(T.transpose(1, 0, 3, 2))
    return T, 8 * L


def _exact_bound(S: np.ndarray, sigma) -> float:
    m = len(sigma)
    n = S.shape[0]
    return float(np.max(np.abs(S))) ** m * n ** (2 * m + 2) * factorial(m + 1) * len(phi_class(sigma)) * 2


def kronecker_case(n: int, sigma, seed: int) -> CaseResult:
    rng = np.random.default_rng(seed)
    S, _den = random_chern_like(n, rng)
    tag = f"kronecker-n{n}-{''.join(map(str, sigma))}-seed{seed}"
    anchor = "generalized Kronecker vanishing and the contracted identity"
    with timed() as tm:
        if _exact_bound(S, sigma) >= EXACT_LIMIT:
            return CaseResult(tag, anchor, "skipped", "", "", "entries too large for exact float sums")
        U = delta_phi_contract(S, sigma, "extra")
        Sym = delta_phi_contract(S, sigma, "first")
        c = delta_phi_contract(S, sigma, "none")
        # the same scalar by closing Sym against one more copy of S
        c_closed = np.einsum("abcd,badc->", Sym, S)
        M = np.einsum("abcd,brdc->ar", Sym, S)
        res_U = float(np.max(np.abs(U)))
        res_id = float(np.max(np.abs(c * np.eye(n) - n * M)))
        res_c = abs(c - c_closed)
    ok = res_U == 0 and res_id == 0 and res_c == 0 and c != 0
    return CaseResult(tag, anchor, "pass" if ok else "fail",
                      "U = 0, c delta = n Sym.S", f"c_Phi(S) = {c.real:.0f}{c.imag:+.0f}i",
                      f"U {res_U:.1e}, identity {res_id:.1e}, closure {res_c:.1e}", tm["t"])


def kronecker_vanishing_check(n: int, trials: int = 20, seed0: int = 0) -> SuiteReport:
    rep = SuiteReport("kronecker")
    for phi in InvariantPolynomial.all_for(n):
        for t in range(trials):
            rep.add(kronecker_case(n, tuple(phi.sigma), seed0 + t))
    return rep
