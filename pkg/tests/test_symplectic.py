"""Covariance-matrix linear algebra: symplectic spectra, PPT, standard forms."""

import numpy as np
import pytest

from cvsep import (
    GaussianEnvelope,
    ThreeModePureStandardForm,
    TwoModeStandardForm,
    ValidationError,
    partial_transpose,
    ppt_separable,
    symplectic_eigenvalues,
    symplectic_form,
    symplectic_invariants_3mode,
    vacuum_envelope,
)
from cvsep.errors import InvalidBipartitionError
from cvsep.symplectic import is_physical, min_symplectic_eigenvalue

from helpers import random_physical_cov, random_symplectic, tmsv_cov


def test_symplectic_form_shape():
    J = symplectic_form(2)
    assert J.shape == (4, 4)
    assert np.array_equal(J[:2, :2], [[0.0, -1.0], [1.0, 0.0]])
    assert np.array_equal(J.T, -J)


def test_vacuum_spectrum():
    nu = symplectic_eigenvalues(0.5 * np.eye(4))
    assert np.allclose(nu, [0.5, 0.5], atol=1e-12)


def test_tmsv_is_pure():
    V = tmsv_cov(0.5)
    nu = symplectic_eigenvalues(V)
    assert np.allclose(nu, [0.5, 0.5], atol=1e-10)
    assert abs(np.linalg.det(2.0 * V) - 1.0) < 1e-10


def test_thermal_spectrum():
    nu = symplectic_eigenvalues(1.5 * np.eye(4))
    assert np.allclose(nu, [1.5, 1.5], atol=1e-12)


def test_spectrum_symplectic_invariance():
    rng = np.random.default_rng(7)
    for _ in range(25):
        n = int(rng.integers(1, 4))
        V = random_physical_cov(n, rng)
        S = random_symplectic(n, rng)
        a = symplectic_eigenvalues(V)
        b = symplectic_eigenvalues(S @ V @ S.T)
        assert np.abs(a - b).max() < 1e-8 * max(1.0, np.abs(a).max())


def test_random_states_are_physical():
    rng = np.random.default_rng(11)
    for _ in range(50):
        n = int(rng.integers(1, 4))
        V = random_physical_cov(n, rng)
        assert is_physical(V)
        assert min_symplectic_eigenvalue(V) >= 0.5 - 1e-9


def test_spectrum_rejects_asymmetric():
    with pytest.raises(ValidationError):
        symplectic_eigenvalues(np.array([[1.0, 0.2], [0.0, 1.0]]))


def test_spectrum_rejects_indefinite():
    with pytest.raises(ValidationError):
        symplectic_eigenvalues(np.diag([1.0, -1.0]))


def test_partial_transpose_flips_momentum_signs():
    V = tmsv_cov(0.5)
    Vt = partial_transpose(V, [1])
    D = np.diag([1.0, 1.0, 1.0, -1.0])
    assert np.array_equal(Vt, D @ V @ D)
    # involution, symmetry, and invariant diagonal
    assert np.array_equal(partial_transpose(Vt, [1]), V)
    assert np.array_equal(Vt, Vt.T)
    assert np.allclose(np.diag(Vt), np.diag(V))


def test_partial_transpose_tmsv_spectrum():
    for r in np.arange(0.1, 2.05, 0.1):
        nu = symplectic_eigenvalues(partial_transpose(tmsv_cov(r), [1]))
        assert np.allclose(nu, [0.5 * np.exp(-2.0 * r), 0.5 * np.exp(2.0 * r)],
                           atol=1e-8 * np.exp(2.0 * r))


def test_partial_transpose_mode_validation():
    V = 0.5 * np.eye(4)
    with pytest.raises(InvalidBipartitionError):
        partial_transpose(V, [])
    with pytest.raises(InvalidBipartitionError):
        partial_transpose(V, [2])
    with pytest.raises(InvalidBipartitionError):
        partial_transpose(V, [0, 1])


def test_ppt_separable_examples():
    ok, nu = ppt_separable(0.5 * np.eye(4), [1])
    assert ok and abs(nu - 0.5) < 1e-12

    ok, nu = ppt_separable(tmsv_cov(0.5), [1])
    assert not ok
    assert abs(nu - 0.5 * np.exp(-1.0)) < 1e-10


def test_ppt_detects_product_states_as_separable():
    rng = np.random.default_rng(3)
    for _ in range(20):
        A = random_physical_cov(1, rng)
        B = random_physical_cov(1, rng)
        V = np.zeros((4, 4))
        V[:2, :2], V[2:, 2:] = A, B
        ok, nu = ppt_separable(V, [0])
        assert ok and nu >= 0.5 - 1e-9


def test_invariants_vacuum():
    d1, d2, d3 = symplectic_invariants_3mode(0.5 * np.eye(6))
    assert abs(d1 - 0.75) < 1e-12
    assert abs(d2 - 0.1875) < 1e-12
    assert abs(d3 - 1.0 / 64.0) < 1e-12


def test_invariants_diagonal_thermal():
    # nu = (1/2, 1, 3/2): char poly (lam^2+1/4)(lam^2+1)(lam^2+9/4)
    V = 0.5 * np.diag([1.0, 1.0, 2.0, 2.0, 3.0, 3.0])
    d1, d2, d3 = symplectic_invariants_3mode(V)
    assert abs(d1 - 3.5) < 1e-12
    assert abs(d2 - 3.0625) < 1e-12
    assert abs(d3 - 0.5625) < 1e-12


def test_invariants_match_eigensolver():
    rng = np.random.default_rng(5)
    for _ in range(20):
        V = random_physical_cov(3, rng)
        Vt = partial_transpose(V, [0])
        d1, d2, d3 = symplectic_invariants_3mode(Vt)
        nus = symplectic_eigenvalues(Vt)
        s = (nus ** 2).sum()
        p2 = (nus[0] * nus[1]) ** 2 + (nus[0] * nus[2]) ** 2 + (nus[1] * nus[2]) ** 2
        p3 = np.prod(nus) ** 2
        scale = max(1.0, abs(d1), abs(d2), abs(d3))
        assert abs(d1 - s) < 1e-8 * scale
        assert abs(d2 - p2) < 1e-8 * scale
        assert abs(d3 - p3) < 1e-8 * scale


def test_envelope_basics():
    env = vacuum_envelope(2)
    assert env.n == 2
    assert np.array_equal(env.mean, np.zeros(4))
    assert np.allclose(env.symplectic_eigenvalues(), [0.5, 0.5])
    shifted = GaussianEnvelope(env.cov, [1.0, 0.0, 0.0, 2.0])
    assert np.array_equal(shifted.centered().mean, np.zeros(4))
    with pytest.raises(ValidationError):
        GaussianEnvelope(0.25 * np.eye(2))
    # unphysical matrices pass when explicitly requested
    GaussianEnvelope(0.25 * np.eye(2), physical=False)


def test_envelope_cov_is_frozen():
    env = vacuum_envelope(1)
    with pytest.raises(ValueError):
        env.cov[0, 0] = 2.0


def test_two_mode_standard_form_spectrum():
    for r in np.arange(0.0, 2.05, 0.1):
        sf = TwoModeStandardForm.two_mode_squeezed_vacuum(r)
        assert np.allclose(sf.matrix, tmsv_cov(r), atol=1e-12)
        lo, hi = sf.tilde_spectrum()
        assert abs(lo - 0.5 * np.exp(-2.0 * r)) < 1e-10 * max(1.0, np.exp(2.0 * r))
        assert abs(hi - 0.5 * np.exp(2.0 * r)) < 1e-10 * max(1.0, np.exp(2.0 * r))


def test_standard_form_spectrum_matches_eigensolver():
    rng = np.random.default_rng(13)
    count = 0
    while count < 20:
        a = rng.uniform(1.0, 3.0)
        b = rng.uniform(1.0, 3.0)
        c = rng.uniform(-1.0, 1.0)
        d = rng.uniform(-1.0, 1.0)
        sf = TwoModeStandardForm(a, b, c, d)
        if not is_physical(sf.matrix, tol=-1e-9):
            continue
        count += 1
        nus = symplectic_eigenvalues(partial_transpose(sf.matrix, [1]))
        assert np.abs(np.sort(sf.tilde_spectrum()) - nus).max() < 1e-8


def test_three_mode_pure_form_roundtrip():
    from helpers import tritter_ghz_cov

    V = tritter_ghz_cov(0.5)
    sf = ThreeModePureStandardForm.from_covariance(V)
    assert sf.purity_defect() < 1e-9
    sf.check_purity(tol=1e-6)
    # balancing is a local symplectic scaling: PT spectra are unchanged
    for mode in range(3):
        a = symplectic_eigenvalues(partial_transpose(V, [mode]))
        b = symplectic_eigenvalues(partial_transpose(sf.matrix, [mode]))
        assert np.abs(a - b).max() < 1e-9


def test_three_mode_form_rejects_cross_terms():
    V = 0.5 * np.eye(6)
    V[0, 1] = V[1, 0] = 0.1
    with pytest.raises(ValidationError):
        ThreeModePureStandardForm.from_covariance(V)
