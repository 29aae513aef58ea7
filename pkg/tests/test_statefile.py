"""Tests for the flat text formats: states, probes, coefficient tables."""

import numpy as np
import pytest

from cvsep.catalog import CpsTsvsParams, cps_tsvs_state
from cvsep.errors import StateFileError
from cvsep.hierarchy import CoefficientScheme
from cvsep.optimize import ProbeParameterization
from cvsep.polynomials import PolyGaussianState
from cvsep.statefile import (
    load_coefficients,
    load_probe,
    load_state,
    save_probe,
    save_state,
)
from cvsep.symplectic import GaussianEnvelope

from helpers import random_physical_cov, tmsv_cov


def test_state_round_trip_bit_identical(tmp_path):
    rng = np.random.default_rng(8)
    state = PolyGaussianState(
        GaussianEnvelope(random_physical_cov(2, rng), rng.normal(size=4))
    )
    path = tmp_path / "state.txt"
    save_state(path, state)
    back = load_state(path)
    assert np.array_equal(back.cov, state.cov)
    assert np.array_equal(back.mean, state.mean)
    assert back.poly.is_constant() and back.poly.constant_value() == 1.0
    again = tmp_path / "state2.txt"
    save_state(again, back)
    assert path.read_bytes() == again.read_bytes()


def test_state_round_trip_with_polynomial(tmp_path):
    params = CpsTsvsParams(
        r=0.35,
        alpha=0.5 * np.exp(1j * np.sqrt(2.0) / 2.0),
        beta=np.sqrt(0.75) * np.exp(1j * np.pi / 2.0),
    )
    state = cps_tsvs_state(params)
    path = tmp_path / "cps.txt"
    save_state(path, state)
    back = load_state(path)
    assert np.array_equal(back.cov, state.cov)
    assert set(back.poly.terms) == set(state.poly.terms)
    for expo, coeff in state.poly.terms.items():
        assert back.poly.terms[expo] == coeff


def test_state_file_omits_default_records(tmp_path):
    path = tmp_path / "vac.txt"
    save_state(path, PolyGaussianState(GaussianEnvelope(0.5 * np.eye(2))))
    text = path.read_text()
    assert "mean" not in text and "poly" not in text
    back = load_state(path)
    assert np.array_equal(back.mean, np.zeros(2))
    assert back.poly.is_constant()


def test_state_file_comments_and_blanks(tmp_path):
    path = tmp_path / "annotated.txt"
    path.write_text(
        "# single mode vacuum\n"
        "n 1\n"
        "\n"
        "cov 0.5 0.0  # first row\n"
        "cov 0.0 0.5\n"
    )
    back = load_state(path)
    assert np.array_equal(back.cov, 0.5 * np.eye(2))


def test_state_file_errors_carry_line_numbers(tmp_path):
    path = tmp_path / "bad.txt"

    def expect(text, needle):
        path.write_text(text)
        with pytest.raises(StateFileError) as info:
            load_state(path)
        assert needle in str(info.value)

    expect("cov 0.5 0.0\n", "first record must be 'n")
    expect("n 1\ncov 0.5\ncov 0.0 0.5\n", "line 2")
    expect("n 1\ncov 0.5 0.0\ncov 0.0 0.5\nmean 0 0\nmean 0 0\n", "line 5")
    expect("n 1\ncov 0.5 0.0\ncov 0.0 0.5\nwhat 1\n", "unknown record")
    expect("n 1\ncov 0.5 zz\ncov 0.0 0.5\n", "non-numeric")
    expect("n 1\ncov 0.5 0.0\n", "expected 2 covariance rows")
    expect("n 1\nn 1\ncov 0.5 0.0\ncov 0.0 0.5\n", "duplicate 'n'")
    expect("n 0\n", "positive")
    expect("n 1\ncov 0.1 0.0\ncov 0.0 0.1\n", "line 2")
    expect("n 1\ncov 0.5 0.0\ncov 0.0 0.5\npoly 1 0 1.0\n", "poly record")
    expect("n 1\ncov 0.5 0.0\ncov 0.0 0.5\npoly -1 0 1.0 0.0\n", "nonnegative")
    path.write_text("")
    with pytest.raises(StateFileError):
        load_state(path)


def test_probe_round_trip_bit_identical(tmp_path):
    probe = ProbeParameterization(
        s=np.array([0.31, -0.82]),
        theta=np.array([1.07, 2.9]),
        x=np.array([0.125, -0.5, 0.75, 1.0 / 3.0]),
    )
    path = tmp_path / "probe.txt"
    save_probe(path, probe)
    back = load_probe(path)
    assert np.array_equal(back.s, probe.s)
    assert np.array_equal(back.theta, probe.theta)
    assert np.array_equal(back.x, probe.x)
    again = tmp_path / "probe2.txt"
    save_probe(again, back)
    assert path.read_bytes() == again.read_bytes()


def test_probe_file_errors(tmp_path):
    path = tmp_path / "bad.txt"

    def expect(text, needle):
        path.write_text(text)
        with pytest.raises(StateFileError) as info:
            load_probe(path)
        assert needle in str(info.value)

    expect("n 1\ns 0.1\ntheta 0.0\n", "missing record(s): x")
    expect("n 1\ns 0.1\ns 0.2\ntheta 0.0\nx 0 0\n", "duplicate 's'")
    expect("n 1\ns 0.1 0.2\ntheta 0.0\nx 0 0\n", "'s' needs 1 entries")
    expect("n 1\ns 0.1\ntheta 0.0\nx 0 0\nbogus 1\n", "unknown record")


def test_coefficient_file_round_trip(tmp_path):
    path = tmp_path / "coeff.txt"
    scheme = CoefficientScheme.bipartite(3)
    path.write_text(
        "k %d\na %s\n" % (scheme.k, " ".join(repr(v) for v in scheme.values))
    )
    back = load_coefficients(path, 3)
    assert back.k == scheme.k and back.n == 3
    assert back.values == scheme.values
    assert back.label == "custom"


def test_coefficient_file_errors(tmp_path):
    path = tmp_path / "bad.txt"

    def expect(text, needle, n=3):
        path.write_text(text)
        with pytest.raises(StateFileError) as info:
            load_coefficients(path, n)
        assert needle in str(info.value)

    expect("k 2\n", "needs 'k' and 'a'")
    expect("a 0.5 0.5 0.0\n", "needs 'k' and 'a'")
    expect("k 2\nk 3\na 0.3 0.3 0.4\n", "duplicate 'k'")
    expect("k 2\na 0.5 0.5\n", "needs 3 coefficients")
    expect("k 9\na 0.3 0.3 0.4\n", "2 <= k <= n")
    expect("k 2\nzz 1\na 0.3 0.3 0.4\n", "unknown record")


def test_loaded_state_usable_downstream(tmp_path):
    path = tmp_path / "tmsv.txt"
    save_state(path, PolyGaussianState(GaussianEnvelope(tmsv_cov(0.5))))
    back = load_state(path)
    assert back.n == 2
    nu = np.linalg.eigvals(back.cov)
    assert nu.shape == (4,)
