"""Floating-point checks: Chern tensor oracles, finite-difference variations, volume."""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .. import hypersurface_num as H
from ..exterior import InvariantPolynomial
from .perturbation import symbolic_objects
from .reinhardt import c_phi_display, chern_components
from .report import CaseResult, SuiteReport, numeric_case, timed


def _random_unit(rng, N):
    v = rng.normal(size=N) + 1j * rng.normal(size=N)
    return v / np.linalg.norm(v)


def _random_orthogonal(rng, N):
    Q, R = np.linalg.qr(rng.normal(size=(N, N)))
    return Q * np.sign(np.diag(R))


def reinhardt_oracle(n: int) -> np.ndarray:
    S = chern_components(n)
    out = np.zeros((n,) * 4)
    for k, v in S.items():
        out[k] = float(v)
    return out


def chern_oracle_cases(n: int = 2, seed: int = 0, sphere_points: int = 50, tube_points: int = 10) -> list:
    rng = np.random.default_rng(seed)
    N = n + 1
    cases = []
    with timed() as tm:
        sph = H.sphere(n)
        worst, worst_sym, worst_tr = 0.0, 0.0, 0.0
        for _ in range(sphere_points):
            C = H.chern_tensor_at(sph, _random_unit(rng, N))
            worst = max(worst, np.linalg.norm(C.S) / max(np.linalg.norm(C.raw), 1e-300))
        cases.append(CaseResult("sphere-S-vanishes", "Chern tensor of the round sphere",
                                "pass" if worst <= 1e-8 else "fail", "|S|/|raw| <= 1e-8", f"{worst:.3e}", f"{worst:.3e}"))
    cases[-1].wall_time = tm["t"]

    with timed() as tm:
        tube = H.reinhardt_tube(n)
        oracle = reinhardt_oracle(n)
        p = np.zeros(N, complex)
        p[0] = 0.5
        worst = 0.0
        for j in range(tube_points):
            y = 1j * rng.normal(size=N)
            if j % 2 == 0:
                # translate in the imaginary directions: same frame as at p
                C = H.chern_tensor_at(tube, p + y)
                diff = C.S - oracle
            else:
                # rotate the real part; carry S back to the frame at p, where the oracle holds
                R = _random_orthogonal(rng, N)
                q = R @ p + y
                C = H.chern_tensor_at(tube, q)
                Fp = H.frame_at(tube, np.linalg.solve(R, q))
                G = H.frame_transition(Fp, C.frame, R)
                diff = H.transport(C.S, G) - oracle
            worst = max(worst, np.max(np.abs(diff)) / np.max(np.abs(oracle)))
            worst_sym = max(worst_sym, C.symmetry_residual())
            worst_tr = max(worst_tr, C.trace_residual())
        cases.append(CaseResult("reinhardt-S-oracle", "Chern tensor of the Reinhardt boundary",
                                "pass" if worst <= 1e-6 else "fail", "componentwise <= 1e-6", f"{worst:.3e}", f"{worst:.3e}"))
        cases.append(CaseResult("tensor-symmetries", "Chern symmetries of the numeric tensor",
                                "pass" if worst_sym <= 1e-9 else "fail", "<= 1e-9", f"{worst_sym:.3e}", f"{worst_sym:.3e}"))
        cases.append(CaseResult("tensor-trace-free", "trace-free numeric tensor",
                                "pass" if worst_tr <= 1e-9 else "fail", "<= 1e-9", f"{worst_tr:.3e}", f"{worst_tr:.3e}"))
    for c in cases[-3:]:
        c.wall_time = tm["t"] / 3

    with timed() as tm:
        pts = [p, p + 1j * rng.normal(size=N)]
        for route in ("grassmann", "contraction"):
            for sigma in (tuple(phi.sigma) for phi in InvariantPolynomial.all_for(n)):
                v = max(abs(H.scalar_invariant_at(tube, q, sigma, route=route) - float(c_phi_display(n, sigma)))
                        for q in pts)
                cases.append(CaseResult(f"reinhardt-cphi-{route}-{''.join(map(str, sigma))}",
                                        "scalar invariant of the Reinhardt boundary",
                                        "pass" if v <= 1e-6 else "fail", str(c_phi_display(n, sigma)), "", f"{v:.3e}"))
        z = _random_unit(rng, N)
        v = abs(H.scalar_invariant_at(sph, z, (0,) * (n - 1) + (1,)))
        cases.append(CaseResult("sphere-cphi-zero", "scalar invariant of the round sphere",
                                "pass" if v <= 1e-10 else "fail", "0", f"{v:.3e}", f"{v:.3e}"))
        U = np.linalg.qr(rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N)))[0]
        fam = H.perturbed_sphere(n, 0.3)
        q = H.radial_point(fam, _random_unit(rng, N))
        v = H.covariance_residual(fam, U, q)
        cases.append(CaseResult("unitary-covariance", "Chern tensor transforms as a tensor under unitary maps",
                                "pass" if v <= 1e-9 else "fail", "<= 1e-9", f"{v:.3e}", f"{v:.3e}"))
        w = max(H.jet_self_test(f, 0.5 * _random_unit(rng, N), tol=np.inf)
                for f in (sph, fam, H.real_ellipsoid(n, 0.2), tube))
        cases.append(CaseResult("jet-self-test", "closed-form jets vs central differences",
                                "pass" if w <= 1e-6 else "fail", "<= 1e-6", f"{w:.3e}", f"{w:.3e}"))
    for c in cases[4:]:
        c.wall_time = tm["t"] / (len(cases) - 4)
    return cases


def sdot_norm_coefficient(n: int) -> Fraction:
    """|Sdot|^2 = K c^4, with K from the symbolic contraction of Sdot with its conjugate."""
    _rel, _F, Sdot, *_ = symbolic_objects()
    (coef,) = (Sdot * Sdot.conjugate()).terms.values()
    K = coef.divide_by_monomial({"c": 4})
    if not K.is_constant():
        raise ArithmeticError(f"|Sdot|^2 is not a multiple of c^4: {coef}")
    return K.constant_term().evaluate(n)


def perturbation_numeric_cases(n: int = 2, sigma=(0, 1), seed: int = 0, step: float = 1e-2,
                               npoints: int = 5, tol: float = 0.01) -> list:
    rng = np.random.default_rng(seed)
    N = n + 1
    dirs = [np.eye(N, dtype=complex)[1]] + [_random_unit(rng, N) for _ in range(npoints - 1)]
    cases = []
    fam = H.perturbed_sphere(n)
    for j, u in enumerate(dirs):
        with timed() as tm:
            rep = H.perturbation_fd_check(n, sigma, u, step)
        tag = "w0" if j == 0 else f"p{j}"
        c = numeric_case(f"fd-cphi-{tag}", "n-th t-derivative of c_Phi(S^t) vs the closed form",
                         rep.estimate, rep.expected, tol)
        c.actual = f"{rep.estimate!r} (steps {[(h, round(v, 10)) for h, v in rep.table]})"
        c.expected = f"{rep.expected!r} (c = {rep.c:.6f})"
        c.wall_time = tm["t"]
        cases.append(c)
    # at w = 0 the value is a known number
    w0 = H.perturbation_fd_check(n, sigma, dirs[0], step)
    cases.append(numeric_case("fd-cphi-w0-value", "closed form at a w = 0 point", w0.expected, -1 / 3, 1e-12))
    with timed() as tm:
        slopes = [H.scaling_slope(n, sigma, u) for u in dirs[:2]]
    cases.append(CaseResult("tn-scaling-slope", "c_Phi(S^t) = O(t^n)",
                            "pass" if all(abs(s - n) <= 0.05 for s in slopes) else "fail",
                            f"{n} +- 0.05", str([round(s, 4) for s in slopes]), "", tm["t"]))
    with timed() as tm:
        K = sdot_norm_coefficient(n)
        u = dirs[1]
        c0 = H.c_from_frame(fam, H.radial_point(fam, u, t=0.0))

        def norm2(t):
            q = H.radial_point(fam, u, t=t)
            return float(np.sum(np.abs(H.orthonormal_raised(H.chern_tensor_at(fam, q, t=t))) ** 2))

        D = [(norm2(h) + norm2(-h) - 2 * norm2(0.0)) / h ** 2 for h in (step, step / 2)]
        est = (4 * D[1] - D[0]) / 3
    c = numeric_case("fd-norm-Sdot", "second t-derivative of |S^t|^2 equals 2|Sdot|^2", est, 2 * float(K) * c0 ** 4, tol)
    c.wall_time = tm["t"]
    cases.append(c)
    with timed() as tm:
        q = H.radial_point(fam, dirs[1], t=0.0)
        z0 = max(abs(H.scalar_invariant_at(fam, q, sigma, t=0.0)), np.linalg.norm(H.chern_tensor_at(fam, q, t=0.0).S))
    cases.append(CaseResult("t0-vanishes", "all quantities vanish at t = 0", "pass" if z0 <= 1e-10 else "fail",
                            "0", f"{z0:.3e}", f"{z0:.3e}", tm["t"]))
    return cases


def volume_cases(n: int = 2, r: float = 1.0, resolution: int = 24, tol: float = 1e-6) -> list:
    with timed() as tm:
        q = float(H.volume_quadrature(n, r, resolution))
        exact = float(H.volume_closed_form(n, r))
        q2 = float(H.volume_quadrature(n, 2 * r, resolution))
    c1 = numeric_case(f"volume-n{n}", "volume of a fundamental domain", q, exact, tol)
    c2 = numeric_case(f"volume-scaling-n{n}", "volume scales as r^-(n+1)", q2 / q, 2.0 ** -(n + 1), 1e-12)
    c1.wall_time = c2.wall_time = tm["t"] / 2
    return [c1, c2]


def run_numeric_suite(n: int = 2, sigma=(0, 1), seed: int = 0, step: float = 1e-2,
                      resolution: int = 24) -> SuiteReport:
    rep = SuiteReport("perturbation-numeric")
    rep.extend(chern_oracle_cases(n, seed))
    if n == 2:
        rep.extend(perturbation_numeric_cases(n, sigma, seed, step))
        rep.notes.append(H.FDReport.note)
    rep.extend(volume_cases(n, 1.0, resolution))
    return rep
