from fractions import Fraction
from math import pi

import numpy as np
import pytest
from hypothesis import given, strategies as st

from crinvariants import hypersurface_num as H
from crinvariants.crcalc.numeric_suite import (chern_oracle_cases, reinhardt_oracle, run_numeric_suite,
                                               sdot_norm_coefficient)


def unit(rng, N):
    v = rng.normal(size=N) + 1j * rng.normal(size=N)
    return v / np.linalg.norm(v)


def unitary(rng, N):
    return np.linalg.qr(rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N)))[0]


ELLIPSOID = H.real_ellipsoid(3, 0.2)


@pytest.mark.parametrize("fam", [H.sphere(2), H.perturbed_sphere(2, 0.3), ELLIPSOID, H.reinhardt_tube(2)],
                         ids=["sphere", "quartic", "ellipsoid", "tube"])
def test_jets_match_differences(fam):
    rng = np.random.default_rng(1)
    N = 4 if fam is ELLIPSOID else 3
    assert H.jet_self_test(fam, 0.5 * unit(rng, N), tol=np.inf) <= 1e-6


@pytest.mark.parametrize("n", [2, 3])
def test_sphere_tensor_vanishes(n):
    rng = np.random.default_rng(n)
    for _ in range(10):
        C = H.chern_tensor_at(H.sphere(n), unit(rng, n + 1))
        assert np.linalg.norm(C.S) <= 1e-8 * np.linalg.norm(C.raw)


def test_reinhardt_oracle_n2_components():
    S = reinhardt_oracle(2)
    assert S.shape == (2, 2, 2, 2)
    assert np.allclose(S, S.transpose(2, 1, 0, 3)) and np.allclose(S, S.transpose(0, 3, 2, 1))
    assert np.allclose(np.einsum("aacd->cd", S), 0) and np.any(S)


@pytest.mark.parametrize("n", [2, 3])
def test_chern_oracle_cases(n):
    cases = chern_oracle_cases(n, seed=3, sphere_points=10, tube_points=4)
    bad = [(c.case_id, c.residual) for c in cases if c.status != "pass"]
    assert not bad


def test_unitary_covariance():
    rng = np.random.default_rng(7)
    fam = H.perturbed_sphere(2, 0.3)
    for _ in range(5):
        q = H.radial_point(fam, unit(rng, 3))
        assert H.covariance_residual(fam, unitary(rng, 3), q) <= 1e-8


def test_pivot_independence():
    fam = H.perturbed_sphere(2, 0.3)
    q = H.radial_point(fam, np.array([0.6, 0.5 + 0.2j, 0.4j]))
    vals = [H.scalar_invariant_at(fam, q, (0, 1))]
    for pivot in range(3):
        C = H.chern_tensor_at(fam, q, pivot=pivot)
        v = H.c_phi_contraction(H.orthonormal_raised(C), (0, 1)).real
        vals.append(v)
    assert max(vals) - min(vals) <= 1e-8 * max(abs(v) for v in vals)


@given(st.integers(0, 2 ** 32 - 1))
def test_tf4_idempotent_and_trace_free(seed):
    rng = np.random.default_rng(seed)
    n = 3
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    h = A @ A.conj().T + np.eye(n)
    u = rng.normal(size=(n,) * 4) + 1j * rng.normal(size=(n,) * 4)
    u = u + u.transpose(2, 1, 0, 3)
    u = u + u.transpose(0, 3, 2, 1)
    t = H.tf4_numeric(u, h)
    hinv = np.linalg.inv(h)
    assert np.max(np.abs(np.einsum("abcd,ba->cd", t, hinv))) <= 1e-9 * np.max(np.abs(u))
    assert np.max(np.abs(H.tf4_numeric(t, h) - t)) <= 1e-12 * max(1.0, np.max(np.abs(t)))


def test_off_surface_rejected():
    with pytest.raises(ValueError):
        H.chern_tensor_at(H.sphere(2), np.array([2.0, 0, 0], complex))


def test_scalar_route_rejected():
    q = np.array([1.0, 0, 0], complex)
    with pytest.raises(ValueError):
        H.scalar_invariant_at(H.sphere(2), q, (0, 1), route="other")


def test_volume_n2_exact_and_convergent():
    exact = 8 * pi ** 4
    assert H.volume_closed_form(2) == pytest.approx(exact, rel=1e-14)
    errs = [abs(H.volume_quadrature(2, 1.0, m) - exact) / exact for m in (4, 8, 24)]
    assert errs[-1] <= 1e-10
    assert errs[0] >= errs[-1]


@pytest.mark.parametrize("n,exact", [(3, 12 * pi ** 6), (4, 64 * pi ** 7)])
def test_volume_higher(n, exact):
    assert H.volume_closed_form(n) == pytest.approx(exact, rel=1e-14)
    assert H.volume_quadrature(n, 1.0, 16) == pytest.approx(exact, rel=1e-6)


def test_volume_scaling_and_errors():
    v1, v3 = H.volume_quadrature(2, 1.0, 12), H.volume_quadrature(2, 3.0, 12)
    assert v3 == pytest.approx(v1 / 27, rel=1e-12)
    with pytest.raises(ValueError):
        H.volume_quadrature(2, -1.0)


def test_volume_n1():
    assert H.volume_quadrature(1, 1.0, 16) == pytest.approx(H.volume_closed_form(1), rel=1e-10)


def test_fd_check_n2():
    rep = H.perturbation_fd_check(2, (0, 1), np.array([0, 1, 0], complex))
    assert rep.expected == pytest.approx(-1 / 3, abs=1e-12)
    assert rep.rel_error <= 0.01


def test_fd_other_n_not_implemented():
    with pytest.raises(NotImplementedError):
        H.perturbation_fd_check(3, (0, 0, 1), np.array([0, 1, 0, 0], complex))


def test_sdot_norm_coefficients():
    # K(n) = (n^5 + 2n^4 - 2n^2 - n)/(n+2); a numpy contraction gave 13.5 and 76.8
    assert sdot_norm_coefficient(2) == Fraction(27, 2)
    assert sdot_norm_coefficient(3) == Fraction(384, 5)


def test_numeric_suite_n2():
    rep = run_numeric_suite(2, resolution=12)
    bad = [(c.case_id, c.residual) for c in rep.cases if c.status != "pass"]
    assert not bad
    assert rep.notes
