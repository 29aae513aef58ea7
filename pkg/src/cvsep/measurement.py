"""Gaussian-measurement statistics and the measurement-based witness.

A Gaussian measurement with covariance sigma_M applied to a Gaussian
state with covariance V produces outcomes distributed as
N(0, sigma_M + V).  The symmetric witness can be written entirely in
terms of that outcome density p and its Fourier transform p-hat, so the
witness is directly estimable from measured outcome records; this module
provides the exact closed forms and a Monte-Carlo estimator built from
the empirical characteristic function plus kernel density evaluation.
"""

import dataclasses

import numpy as np
from scipy.linalg import solve_triangular

from .errors import (
    NumericalFailureError,
    SampleSizeError,
    StateFileError,
    ValidationError,
)
from .hierarchy import CoefficientScheme
from .polynomials import PolyGaussianState
from .probes import enumerate_bipartitions
from .symplectic import GaussianEnvelope, symplectic_form, _as_cov


__all__ = [
    "GaussianMeasurement",
    "OutcomeSample",
    "MonteCarloEstimate",
    "outcome_pdf",
    "characteristic_fn",
    "tau_from_statistics",
    "sample_outcomes",
    "estimate_tau_monte_carlo",
    "save_samples",
    "load_samples",
]

MIN_SAMPLES = 1000


@dataclasses.dataclass(frozen=True)
class GaussianMeasurement:
    """Measurement operator with Gaussian Weyl symbol of covariance sigma_m."""

    sigma_m: np.ndarray

    def __post_init__(self):
        sigma = _as_cov(self.sigma_m)
        if np.linalg.eigvalsh(sigma).min() <= 0.0:
            raise ValidationError("measurement covariance must be positive definite")
        sigma.setflags(write=False)
        object.__setattr__(self, "sigma_m", sigma)

    @property
    def n(self):
        return self.sigma_m.shape[0] // 2


def _envelope(state):
    if isinstance(state, PolyGaussianState):
        if not state.poly.is_constant() or abs(
            state.poly.constant_value() - 1.0
        ) > 1e-12:
            raise ValidationError("measurement statistics cover Gaussian states only")
        state = state.envelope
    if not isinstance(state, GaussianEnvelope):
        state = GaussianEnvelope(state)
    return state


def _outcome_cov(state, m):
    if m.sigma_m.shape != state.cov.shape:
        raise ValidationError("measurement and state mode counts differ")
    return m.sigma_m + state.cov


def outcome_pdf(state, m, x_m):
    """Probability density of outcome x_m: normal with covariance sigma_m + V."""
    state = _envelope(state)
    C = _outcome_cov(state, m)
    x = np.asarray(x_m, dtype=float) - state.mean
    n = state.n
    sign, logdet = np.linalg.slogdet(C)
    if sign <= 0:
        raise NumericalFailureError("outcome covariance is not positive definite")
    q = x @ np.linalg.solve(C, x)
    return float(np.exp(-0.5 * q - n * np.log(2.0 * np.pi) - 0.5 * logdet))


def characteristic_fn(state, m, omega):
    """Fourier transform (2 pi)^{-n} exp(-omega^T (sigma_m+V) omega / 2) of the density."""
    state = _envelope(state)
    C = _outcome_cov(state, m)
    omega = np.asarray(omega, dtype=float)
    phase = np.exp(-1j * omega @ state.mean)
    return complex(
        phase * np.exp(-0.5 * omega @ C @ omega) / (2.0 * np.pi) ** state.n
    )


def _check_pure_blockdiag(Sigma, n):
    off = Sigma.copy()
    for m in range(n):
        block = Sigma[2 * m : 2 * m + 2, 2 * m : 2 * m + 2]
        det = block[0, 0] * block[1, 1] - block[0, 1] * block[1, 0]
        if abs(det - 0.25) > 1e-9 * max(1.0, np.abs(block).max() ** 2):
            raise ValidationError("Sigma blocks must have det 1/4 (pure probes)")
        off[2 * m : 2 * m + 2, 2 * m : 2 * m + 2] = 0.0
    if np.abs(off).max() > 1e-12 * max(1.0, np.abs(Sigma).max()):
        raise ValidationError("Sigma must be block diagonal over modes")


def tau_from_statistics(state, Sigma, X, cs):
    """Witness value assembled from Gaussian outcome statistics.

    First term: exp(-2 X^T J^T Sigma J X) times the omega-integral
    of exp(-2 omega^T Sigma J X) p-hat(omega), evaluated in closed form;
    subtrahend: (2 pi)^n sum_j a_j p(P_j X).  Equals
    tau_symmetric(state, X, Sigma, cs) identically for zero-mean
    Gaussian states.
    """
    state = _envelope(state)
    if np.abs(state.mean).max(initial=0.0) > 0.0:
        raise ValidationError("the statistics form needs a zero-mean state")
    n = state.n
    X = np.asarray(X, dtype=float)
    if X.shape != (2 * n,):
        raise ValidationError("displacement must have length 2n")
    Sigma = _as_cov(Sigma)
    if Sigma.shape != state.cov.shape:
        raise ValidationError("Sigma must be 2n x 2n")
    _check_pure_blockdiag(Sigma, n)
    if cs.n != n:
        raise ValidationError("coefficient scheme is for n=%d, state has n=%d" % (cs.n, n))
    meas = GaussianMeasurement(Sigma)
    C = Sigma + state.cov
    sign, logdet = np.linalg.slogdet(C)
    if sign <= 0:
        raise NumericalFailureError("Sigma + V is not positive definite")
    J = symplectic_form(n)
    c = Sigma @ J @ X
    first = np.exp(-2.0 * (J @ X) @ c + 2.0 * c @ np.linalg.solve(C, c)
                   - 0.5 * logdet)
    sub = 0.0
    scale = (2.0 * np.pi) ** n
    for a, b in zip(cs.values, enumerate_bipartitions(n)):
        sub += a * scale * outcome_pdf(state, meas, b.sign_vector() * X)
    return float(first - sub)


@dataclasses.dataclass(frozen=True)
class OutcomeSample:
    """Simulated measurement record: one outcome vector per row."""

    samples: np.ndarray
    seed: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 2 or samples.shape[1] % 2 != 0:
            raise ValidationError("samples must be (count, 2n)")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @property
    def n(self):
        return self.samples.shape[1] // 2

    @property
    def count(self):
        return self.samples.shape[0]


def sample_outcomes(state, m, count, seed):
    """Draw i.i.d. outcomes from N(mean, sigma_m + V).

    Uses a counter-based generator keyed by the seed alone, so the
    record is reproducible from (state, measurement, count, seed).
    """
    state = _envelope(state)
    C = _outcome_cov(state, m)
    if count < 1:
        raise ValidationError("need a positive sample count")
    L = np.linalg.cholesky(C)
    rng = np.random.Generator(np.random.Philox(seed))
    z = rng.standard_normal((count, C.shape[0]))
    samples = z @ L.T + state.mean
    return OutcomeSample(samples=samples, seed=int(seed))


@dataclasses.dataclass(frozen=True)
class MonteCarloEstimate:
    estimate: float
    stderr: float
    first_term: float
    subtrahend: float
    count: int
    smoothing: float
    resamples: int


def estimate_tau_monte_carlo(sample, Sigma, X, cs, smoothing=1.0, resamples=200,
                             bootstrap_seed=0):
    """Witness estimate from an outcome record, with bootstrap standard error.

    Both witness pieces are means of per-sample contributions.  For the
    first term, the empirical characteristic function is damped by a
    Gaussian factor exp(-omega^T T omega / 2) with T = smoothing * C_hat
    (C_hat the sample covariance), which makes each sample's
    omega-integral a closed-form complex Gaussian integral; for the
    subtrahend, the densities at the reflected points P_j X are Gaussian
    kernel density estimates with bandwidth matrix T.  Damping and
    smoothing are then undone by the Gaussian-family ratios
    I(C_hat)/I_damped(C_hat) and N(y; 0, C_hat)/N(y; 0, C_hat + T),
    which remove the bias exactly when the outcome distribution is
    Gaussian.  The bandwidth is deliberately far larger than a classic
    density-estimation choice: with the exact Gaussian correction in
    place, a large kernel only lowers the variance.  The standard error
    is a multinomial bootstrap over the per-sample contributions
    (covariance, damping and debias factors held fixed).

    The per-sample spread of the first term grows like
    exp(c^T C_hat^-1 c) with c = Sigma J X, so accuracy degrades
    exponentially with the probe displacement scale; the bootstrap
    standard error reports this honestly.
    """
    if sample.count < MIN_SAMPLES:
        raise SampleSizeError(
            "need at least %d samples, got %d" % (MIN_SAMPLES, sample.count)
        )
    n = sample.n
    d = 2 * n
    X = np.asarray(X, dtype=float)
    if X.shape != (d,):
        raise ValidationError("displacement must have length 2n")
    Sigma = _as_cov(Sigma)
    _check_pure_blockdiag(Sigma, n)
    if cs.n != n:
        raise ValidationError("coefficient scheme is for n=%d, sample has n=%d" % (cs.n, n))
    lam = float(smoothing)
    if lam <= 0.0:
        raise ValidationError("smoothing must be positive")
    data = sample.samples
    N = sample.count
    J = symplectic_form(n)
    c = Sigma @ J @ X
    pref_log = -2.0 * (J @ X) @ c
    reflections = [
        (a, b.sign_vector() * X)
        for a, b in zip(cs.values, enumerate_bipartitions(n))
    ]
    scale = (2.0 * np.pi) ** n

    def per_sample(second_moment):
        # second_moment estimates Sigma + V (state mean is zero by contract)
        try:
            L = np.linalg.cholesky(second_moment)
        except np.linalg.LinAlgError:
            raise NumericalFailureError("sample covariance is degenerate")
        logdet = 2.0 * np.log(np.diag(L)).sum()
        white = solve_triangular(L, data.T, lower=True)  # (d, N)
        maha = np.einsum("dn,dn->n", white, white)

        # first term: damped empirical characteristic function, closed
        # form per sample, then the exact Gaussian-family ratio undoes
        # the damping
        c_w = solve_triangular(L, c, lower=True)
        q_hat = float(c_w @ c_w)
        const_log = (
            pref_log
            + 2.0 * q_hat * lam / (1.0 + lam)
            + 2.0 * q_hat / lam
            + n * np.log((1.0 + lam) / lam)
            - 0.5 * logdet
        )
        if const_log > 600.0:
            raise NumericalFailureError(
                "probe displacement too large relative to the outcome "
                "spread for a finite-variance estimate"
            )
        osc = 2.0 * (c_w @ white) / lam
        first_i = np.exp(const_log - 0.5 * maha / lam) * np.cos(osc)

        # subtrahend: wide-bandwidth Gaussian kernel density estimate at
        # the reflected displacements, same Gaussian-family debias
        log_norm = -n * np.log(2.0 * np.pi * lam) - 0.5 * logdet
        sub_i = np.zeros(N)
        for a, y in reflections:
            y_w = solve_triangular(L, y, lower=True)
            y_maha = float(y_w @ y_w)
            kern = np.exp(
                log_norm - 0.5 * (maha - 2.0 * (y_w @ white) + y_maha) / lam
            )
            debias = np.exp(
                n * np.log(1.0 + lam) - 0.5 * y_maha * lam / (1.0 + lam)
            )
            sub_i += a * scale * debias * kern
        return first_i, sub_i

    moment = data.T @ data / N
    first_i, sub_i = per_sample(moment)
    tau_i = first_i - sub_i
    estimate = float(tau_i.mean())

    # full bootstrap: the covariance estimate and every factor derived
    # from it are recomputed inside each resample
    rng = np.random.Generator(np.random.Philox(bootstrap_seed))
    weights = np.full(N, 1.0 / N)
    boot = np.empty(resamples)
    for r in range(resamples):
        counts = rng.multinomial(N, weights).astype(float)
        moment_r = data.T @ (counts[:, None] * data) / N
        f_r, s_r = per_sample(moment_r)
        boot[r] = counts @ (f_r - s_r) / N
    return MonteCarloEstimate(
        estimate=estimate,
        stderr=float(boot.std(ddof=1)),
        first_term=float(first_i.mean()),
        subtrahend=float(sub_i.mean()),
        count=N,
        smoothing=lam,
        resamples=resamples,
    )


def save_samples(path, sample):
    """CSV with a # seed metadata line, header q0,p0,..., one outcome per row."""
    header = ",".join("q%d,p%d" % (m, m) for m in range(sample.n))
    with open(path, "w", newline="") as fh:
        fh.write("# seed=%d\n" % sample.seed)
        fh.write(header + "\n")
        for row in sample.samples:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def load_samples(path):
    seed = 0
    rows = []
    expected = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("seed="):
                    try:
                        seed = int(body[5:])
                    except ValueError:
                        raise StateFileError("invalid seed metadata", lineno)
                continue
            if line.startswith("q0,"):
                continue
            parts = line.split(",")
            if expected is None:
                expected = len(parts)
                if expected % 2 != 0:
                    raise StateFileError("outcome rows need 2n columns", lineno)
            elif len(parts) != expected:
                raise StateFileError(
                    "expected %d columns, got %d" % (expected, len(parts)), lineno
                )
            try:
                rows.append([float(p) for p in parts])
            except ValueError:
                raise StateFileError("non-numeric outcome entry", lineno)
    if not rows:
        raise StateFileError("no outcome rows found", 0)
    return OutcomeSample(samples=np.array(rows), seed=seed)
