"""Witness functional: coefficient schemes, closed forms, route agreement."""

import numpy as np
import pytest
from scipy.linalg import block_diag

from cvsep import (
    CoefficientScheme,
    GaussianEnvelope,
    GhzParams,
    MultiPoly,
    PolyGaussianState,
    ProbeSet,
    ValidationError,
    ghz_state,
    tau_gaussian,
    tau_general,
    tau_symmetric,
    vacuum_envelope,
)
from cvsep.optimize import ProbeParameterization

from helpers import (
    random_physical_cov,
    random_pure_sigma,
    random_separable_cov,
    rotated_squeezed_block,
    tmsv_cov,
)

TMSV_CERT = ProbeParameterization(
    s=np.array([-0.3557, 0.3557]),
    theta=np.array([1.1078, 0.4630]),
    x=np.array([0.7866, -0.3926, 0.7866, 0.3926]),
)

GHZ_CERT = ProbeParameterization(
    s=np.array([-0.8593, -0.7848, -0.9838]),
    theta=np.array([0.0730, 3.0269, 3.1306]),
    x=np.array([-0.6115, 0.8295, 0.2549, 0.7966, -0.5759, 0.7778]),
)


def symmetric_probe_set(sigma_blocks, X):
    sigmas = [np.asarray(b) for b in sigma_blocks]
    return ProbeSet.symmetric(sigmas, X)


def test_scheme_constructors():
    g = CoefficientScheme.genuine(3)
    assert g.k == 3 and g.values == (1.0, 1.0, 1.0)
    b = CoefficientScheme.bipartite(3)
    assert b.k == 2
    assert np.allclose(b.values, 1.0 / 3.0)
    assert abs(b.total - 1.0) < 1e-15
    u = CoefficientScheme.uniform(3, 4)
    assert u.k == 3 and len(u.values) == 7
    # endpoints of the uniform rule match the exact schemes
    assert CoefficientScheme.uniform(2, 3).values == CoefficientScheme.bipartite(3).values
    assert CoefficientScheme.uniform(3, 3).values == CoefficientScheme.genuine(3).values


def test_scheme_validation():
    with pytest.raises(ValidationError):
        CoefficientScheme.custom(2, 3, (1.0, 1.0))
    with pytest.raises(ValidationError):
        CoefficientScheme.custom(2, 3, (1.0, -0.5, 1.0))
    with pytest.raises(ValidationError):
        CoefficientScheme(k=1, n=3, values=(1.0,) * 3)
    with pytest.raises(ValidationError):
        CoefficientScheme(k=4, n=3, values=(1.0,) * 3)


def test_tau_symmetric_zero_displacement():
    rng = np.random.default_rng(41)
    for n in (2, 3):
        V = random_physical_cov(n, rng)
        Sigma = random_pure_sigma(n, rng)
        env = GaussianEnvelope(V)
        # k=2: weights sum to 1, every term equals the first -> exactly 0
        assert tau_symmetric(env, np.zeros(2 * n), Sigma, CoefficientScheme.bipartite(n)) == 0.0
    # k=n=3: value collapses to (1 - 3)/sqrt(det(Sigma + V))
    V = random_physical_cov(3, rng)
    Sigma = random_pure_sigma(3, rng)
    got = tau_symmetric(GaussianEnvelope(V), np.zeros(6), Sigma, CoefficientScheme.genuine(3))
    want = (1.0 - 3.0) / np.sqrt(np.linalg.det(Sigma + V))
    assert abs(got - want) < 1e-12 * max(1.0, abs(want))


def test_tau_symmetric_validation():
    env = vacuum_envelope(2)
    cs = CoefficientScheme.bipartite(2)
    with pytest.raises(ValidationError):
        tau_symmetric(env, np.zeros(3), 0.5 * np.eye(4), cs)
    with pytest.raises(ValidationError):
        tau_symmetric(env, np.zeros(4), np.eye(4), cs)  # blocks not pure
    off = 0.5 * np.eye(4)
    off[0, 2] = off[2, 0] = 0.1
    with pytest.raises(ValidationError):
        tau_symmetric(env, np.zeros(4), off, cs)
    displaced = GaussianEnvelope(0.5 * np.eye(4), [1.0, 0.0, 0.0, 0.0])
    with pytest.raises(ValidationError):
        tau_symmetric(displaced, np.zeros(4), 0.5 * np.eye(4), cs)


def test_tau_gaussian_rejects_polynomial_states():
    poly_state = PolyGaussianState(
        vacuum_envelope(2), MultiPoly(4, {(2, 0, 0, 0): 1.0})
    )
    with pytest.raises(ValidationError):
        tau_gaussian(poly_state, ProbeSet.vacuum(2), CoefficientScheme.bipartite(2))


def test_routes_agree_on_gaussian_states():
    # tau_general with F = 1 equals tau_gaussian equals tau_symmetric
    rng = np.random.default_rng(42)
    for _ in range(100):
        n = int(rng.integers(2, 4))
        V = random_physical_cov(n, rng)
        env = GaussianEnvelope(V)
        Sigma_blocks = [
            rotated_squeezed_block(rng.uniform(-0.8, 0.8), rng.uniform(0, np.pi))
            for _ in range(n)
        ]
        X = rng.uniform(-1.0, 1.0, size=2 * n)
        ps = symmetric_probe_set(Sigma_blocks, X)
        cs = CoefficientScheme.bipartite(n)
        a = tau_general(PolyGaussianState(env), ps, cs).value
        b = tau_gaussian(env, ps, cs).value
        c = tau_symmetric(env, X, block_diag(*Sigma_blocks), cs)
        scale = max(1.0, abs(a))
        assert abs(a - b) < 1e-11 * scale
        assert abs(a - c) < 1e-11 * scale


def test_result_bookkeeping():
    env = GaussianEnvelope(tmsv_cov(0.5))
    cs = CoefficientScheme.bipartite(2)
    ps = symmetric_probe_set(
        [rotated_squeezed_block(-0.3557, 1.1078), rotated_squeezed_block(0.3557, 0.4630)],
        TMSV_CERT.x,
    )
    res = tau_gaussian(env, ps, cs)
    assert abs(res.value - (res.first_term - res.subtrahend())) < 1e-14
    assert len(res.per_bipartition) == 1
    assert res.per_bipartition[0].coefficient == 1.0
    assert res.value > 0.3


def test_tmsv_certificate_detects():
    env = GaussianEnvelope(tmsv_cov(0.5))
    cs = CoefficientScheme.bipartite(2)
    val = tau_symmetric(env, TMSV_CERT.x, TMSV_CERT.sigma(), cs)
    assert val > 0.3


def test_separable_states_never_detected():
    rng = np.random.default_rng(43)
    for _ in range(60):
        n = int(rng.integers(2, 4))
        V = random_separable_cov(n, rng)
        env = GaussianEnvelope(V)
        Sigma = random_pure_sigma(n, rng)
        X = rng.uniform(-2.0, 2.0, size=2 * n)
        for cs in (CoefficientScheme.bipartite(n), CoefficientScheme.genuine(n)):
            assert tau_symmetric(env, X, Sigma, cs) <= 1e-10


def test_thermal_states_never_detected():
    rng = np.random.default_rng(44)
    for _ in range(20):
        n = int(rng.integers(2, 4))
        V = np.diag(np.repeat(0.5 + rng.uniform(0.0, 2.0, size=n), 2))
        Sigma = random_pure_sigma(n, rng)
        X = rng.uniform(-2.0, 2.0, size=2 * n)
        assert tau_symmetric(GaussianEnvelope(V), X, Sigma, CoefficientScheme.bipartite(n)) <= 1e-10


def test_ghz_certificate_and_g_monotonicity():
    cs = CoefficientScheme.genuine(3)
    vals = []
    for g in np.arange(0.0, 0.31, 0.03):
        env = ghz_state(GhzParams(r=0.5, g=float(g)))
        vals.append(tau_symmetric(env, GHZ_CERT.x, GHZ_CERT.sigma(), cs))
    assert vals[0] > 0.03
    # extra classical noise only hurts detection at fixed probes
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_scheme_interpolation_monotonicity():
    # elementwise-larger coefficient tables can only lower tau
    rng = np.random.default_rng(45)
    for _ in range(50):
        n = 3
        V = random_physical_cov(n, rng)
        env = GaussianEnvelope(V)
        Sigma = random_pure_sigma(n, rng)
        X = rng.uniform(-1.0, 1.0, size=2 * n)
        t2 = tau_symmetric(env, X, Sigma, CoefficientScheme.bipartite(n))
        t3 = tau_symmetric(env, X, Sigma, CoefficientScheme.genuine(n))
        assert t3 <= t2 + 1e-14


def test_displacement_covariance():
    # displacing state and probes together leaves tau unchanged
    rng = np.random.default_rng(46)
    for _ in range(20):
        n = int(rng.integers(2, 4))
        V = random_physical_cov(n, rng)
        Sigma_blocks = [
            rotated_squeezed_block(rng.uniform(-0.5, 0.5), rng.uniform(0, np.pi))
            for _ in range(n)
        ]
        X = rng.uniform(-1.0, 1.0, size=2 * n)
        m = rng.uniform(-1.0, 1.0, size=2 * n)
        cs = CoefficientScheme.bipartite(n)
        ps = symmetric_probe_set(Sigma_blocks, X)
        base = tau_general(PolyGaussianState(GaussianEnvelope(V)), ps, cs).value
        moved = tau_general(
            PolyGaussianState(GaussianEnvelope(V, m)), ps.shifted(-m), cs
        ).value
        assert abs(base - moved) < 1e-10 * max(1.0, abs(base))


def test_mode_count_mismatches_rejected():
    env = vacuum_envelope(2)
    with pytest.raises(ValidationError):
        tau_gaussian(env, ProbeSet.vacuum(3), CoefficientScheme.bipartite(3))
    with pytest.raises(ValidationError):
        tau_gaussian(env, ProbeSet.vacuum(2), CoefficientScheme.bipartite(3))
