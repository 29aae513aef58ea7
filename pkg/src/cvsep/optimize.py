"""Multi-start derivative-free maximization of the separability witness.

The witness is smooth in the probe parameters but its gradients are
cumbersome, so each restart runs a Nelder-Mead simplex search.  Restart
start points always include vacuum probes and strongly squeezed probes
(s = +-3); the squeezed-probe limit recovers the PPT test for Gaussian
states, which makes those corners reliable basins.  The best value found
is a lower bound on the true maximum: no global guarantee is claimed.
"""

import dataclasses

import numpy as np
import scipy.optimize

from .errors import OptimizationFailureError, NumericalFailureError, ValidationError
from .hierarchy import CoefficientScheme, tau_general, tau_symmetric
from .polynomials import PolyGaussianState, as_poly_state
from .probes import ProbeSet, SingleModeProbe, rotation
from .symplectic import GaussianEnvelope


__all__ = [
    "ProbeParameterization",
    "OptimizerConfig",
    "OptimizationReport",
    "ClassificationEntry",
    "maximize_tau",
    "classify_state",
    "scheme_for",
]

SIMPLEX_STEP_SQUEEZE = 0.35
SIMPLEX_STEP_SHIFT = 0.5


@dataclasses.dataclass(frozen=True)
class ProbeParameterization:
    """Per-mode probe squeezing s, rotation theta, and displacement x.

    Each probe covariance block is R(theta) diag(e^{-2s}, e^{2s}) R(theta)^T / 2
    (always det 1/4); theta is stored modulo pi since a half turn leaves
    the block invariant.
    """

    s: np.ndarray
    theta: np.ndarray
    x: np.ndarray
    s_max: float = 6.0

    def __post_init__(self):
        s = np.asarray(self.s, dtype=float)
        theta = np.mod(np.asarray(self.theta, dtype=float), np.pi)
        x = np.asarray(self.x, dtype=float)
        if s.ndim != 1 or theta.shape != s.shape or x.shape != (2 * s.size,):
            raise ValidationError("expected s, theta of length n and x of length 2n")
        if np.abs(s).max(initial=0.0) > self.s_max + 1e-12:
            raise ValidationError("|s| exceeds the squeezing bound s_max")
        for name, val in (("s", s), ("theta", theta), ("x", x)):
            object.__setattr__(self, name, val)
            val.setflags(write=False)

    @property
    def n(self):
        return self.s.size

    def sigma_block(self, m):
        R = rotation(self.theta[m])
        return R @ np.diag([0.5 * np.exp(-2.0 * self.s[m]),
                            0.5 * np.exp(2.0 * self.s[m])]) @ R.T

    def sigma_blocks(self):
        return [self.sigma_block(m) for m in range(self.n)]

    def sigma(self):
        n = self.n
        S = np.zeros((2 * n, 2 * n))
        for m in range(n):
            S[2 * m : 2 * m + 2, 2 * m : 2 * m + 2] = self.sigma_block(m)
        return S

    def to_probe_set(self):
        """Symmetric probe set: means x on the first family, -x on the second."""
        return ProbeSet.symmetric(self.sigma_blocks(), self.x)

    def to_vector(self):
        return np.concatenate([self.s, self.theta, self.x])

    @classmethod
    def from_vector(cls, n, vec, s_max=6.0):
        """Unpack [s, theta, x]; s is clipped to the bound, theta wrapped."""
        vec = np.asarray(vec, dtype=float)
        if vec.shape != (4 * n,):
            raise ValidationError("parameter vector must have length 4n")
        return cls(np.clip(vec[:n], -s_max, s_max), vec[n : 2 * n],
                   vec[2 * n :], s_max)


@dataclasses.dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 8
    seed: int = 0
    max_evaluations: int = 2000
    s_max: float = 6.0
    threshold: float = 1e-9
    symmetric_probes: bool = True
    xatol: float = 1e-8
    initial_params: object = None

    def __post_init__(self):
        if self.restarts < 1:
            raise ValidationError("need at least one restart")
        if self.max_evaluations < 1:
            raise ValidationError("need a positive evaluation budget")


@dataclasses.dataclass(frozen=True)
class OptimizationReport:
    best_value: float
    best_params: object
    restarts: int
    converged_restarts: int
    evaluations: int
    threshold: float = 1e-9

    @property
    def detected(self):
        return self.best_value > self.threshold


@dataclasses.dataclass(frozen=True)
class ClassificationEntry:
    detected: bool
    value: float
    report: OptimizationReport


def scheme_for(k, n):
    """Coefficient scheme used when classifying at level k."""
    if k == n:
        return CoefficientScheme.genuine(n)
    if k == 2:
        return CoefficientScheme.bipartite(n)
    return CoefficientScheme.uniform(k, n)


class _Objective:
    """Maps a packed parameter vector to -tau, counting evaluations."""

    def __init__(self, state, cs, config):
        self.state = as_poly_state(state)
        self.cs = cs
        self.config = config
        self.n = self.state.n
        self.evaluations = 0
        zero_mean = self.state.mean is None or not np.abs(self.state.mean).any()
        self.fast = (config.symmetric_probes and zero_mean
                     and self.state.poly.is_constant())
        self.dim = (4 if config.symmetric_probes else 8) * self.n

    def params_from_vector(self, vec):
        n, smax = self.n, self.config.s_max
        if self.config.symmetric_probes:
            return ProbeParameterization.from_vector(n, vec, smax)
        return (ProbeParameterization.from_vector(n, vec[: 4 * n], smax),
                ProbeParameterization.from_vector(n, vec[4 * n :], smax))

    def probe_set(self, params):
        if self.config.symmetric_probes:
            return params.to_probe_set()
        p1, p2 = params
        first = [SingleModeProbe(p1.sigma_block(m), p1.x[2 * m : 2 * m + 2])
                 for m in range(self.n)]
        second = [SingleModeProbe(p2.sigma_block(m), p2.x[2 * m : 2 * m + 2])
                  for m in range(self.n)]
        return ProbeSet(first + second)

    def tau(self, params):
        if self.fast:
            return tau_symmetric(self.state, params.x, params.sigma(), self.cs)
        return tau_general(self.state, self.probe_set(params), self.cs).value

    def __call__(self, vec):
        self.evaluations += 1
        try:
            value = self.tau(self.params_from_vector(vec))
        except NumericalFailureError:
            return np.inf
        if not np.isfinite(value):
            return np.inf
        return -value

    def start_vectors(self):
        cfg = self.config
        starts = []
        if cfg.initial_params is not None:
            p = cfg.initial_params
            vec = (p.to_vector() if cfg.symmetric_probes
                   else np.concatenate([p[0].to_vector(), p[1].to_vector()]))
            if vec.shape != (self.dim,):
                raise ValidationError("initial_params does not match the mode count")
            starts.append(vec)
        n, d = self.n, self.dim
        for s0 in (0.0, 3.0, -3.0):
            vec = np.zeros(d)
            vec[:n] = s0
            if not cfg.symmetric_probes:
                vec[4 * n : 5 * n] = s0
            starts.append(vec)
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed))
        while len(starts) < cfg.restarts + (cfg.initial_params is not None):
            s = rng.uniform(-3.0, 3.0, n)
            theta = rng.uniform(0.0, np.pi, n)
            x = rng.normal(0.0, 1.5, 2 * n)
            vec = np.concatenate([s, theta, x])
            if not cfg.symmetric_probes:
                vec = np.concatenate([vec, np.concatenate([
                    rng.uniform(-3.0, 3.0, n), rng.uniform(0.0, np.pi, n),
                    rng.normal(0.0, 1.5, 2 * n)])])
            starts.append(vec)
        return starts[: cfg.restarts + (cfg.initial_params is not None)]


def _initial_simplex(x0, n, symmetric):
    d = x0.size
    steps = np.empty(d)
    blocks = 1 if symmetric else 2
    for b in range(blocks):
        o = b * 4 * n
        steps[o : o + 2 * n] = SIMPLEX_STEP_SQUEEZE
        steps[o + 2 * n : o + 4 * n] = SIMPLEX_STEP_SHIFT
    return np.vstack([x0] + [x0 + steps[i] * np.eye(d)[i] for i in range(d)])


def maximize_tau(state, cs, config=None):
    """Maximize the witness over probe parameters with restarted Nelder-Mead.

    Gaussian zero-mean states with symmetric probes use the closed-form
    objective; polynomial or displaced states evaluate the full
    criterion.  Deterministic for a fixed config.  The report is a
    checkable certificate: re-evaluating tau at best_params reproduces
    best_value exactly.
    """
    config = config or OptimizerConfig()
    objective = _Objective(state, cs, config)
    best_value = -np.inf
    best_vec = None
    converged = 0
    failures = []
    for x0 in objective.start_vectors():
        try:
            res = scipy.optimize.minimize(
                objective, x0, method="Nelder-Mead",
                options=dict(
                    maxfev=config.max_evaluations,
                    xatol=config.xatol,
                    fatol=1e-14,
                    initial_simplex=_initial_simplex(
                        x0, objective.n, config.symmetric_probes),
                ),
            )
        except (ValueError, FloatingPointError) as exc:
            failures.append(str(exc))
            continue
        converged += bool(res.success)
        if np.isfinite(res.fun) and -res.fun > best_value:
            best_value = -res.fun
            best_vec = res.x
    if best_vec is None:
        raise OptimizationFailureError(
            "no restart produced a finite witness value: %s" % "; ".join(failures)
        )
    best_params = objective.params_from_vector(best_vec)
    # canonicalized parameters (clipped s, wrapped theta) give the same value
    certificate = objective.tau(best_params)
    best_value = max(best_value, certificate)
    return OptimizationReport(
        best_value=float(best_value),
        best_params=best_params,
        restarts=config.restarts,
        converged_restarts=converged,
        evaluations=objective.evaluations,
        threshold=config.threshold,
    )


def classify_state(state, ks=None, config=None):
    """Run maximize_tau per level k, reporting detection against the threshold.

    Levels run from the highest k down; each maximizer seeds the next
    lower level with its best parameters.  The detection regions nest
    (lower k subtracts less), so the warm start guarantees the reported
    values are monotone in k.
    """
    config = config or OptimizerConfig()
    state = as_poly_state(state)
    n = state.n
    if ks is None:
        ks = list(range(2, n + 1))
    if any(k < 2 or k > n for k in ks):
        raise ValidationError("levels must satisfy 2 <= k <= n")
    out = {}
    warm = config.initial_params
    for k in sorted(set(ks), reverse=True):
        seed = int(np.random.SeedSequence([config.seed, k]).generate_state(1)[0])
        cfg = dataclasses.replace(config, seed=seed, initial_params=warm)
        report = maximize_tau(state, scheme_for(k, n), cfg)
        out[k] = ClassificationEntry(
            detected=bool(report.best_value > config.threshold),
            value=report.best_value,
            report=report,
        )
        warm = report.best_params
    return dict(sorted(out.items()))
