"""Example state families and their thermal-loss time evolution.

Provides the mixed three-mode GHZ-type Gaussian family, the coherently
photon-subtracted two-mode squeezed vacuum (CPS-TSVS), and a Gaussian
thermal channel propagator that acts on polynomial-times-Gaussian Wigner
functions in closed form.
"""

import dataclasses

import numpy as np

from .errors import ValidationError
from .polynomials import MultiPoly, PolyGaussianState, heat_smoothed
from .symplectic import GaussianEnvelope


__all__ = [
    "GhzParams",
    "CpsTsvsParams",
    "ThermalChannel",
    "ghz_state",
    "ghz_symplectic_spectrum",
    "cps_tsvs_state",
    "green_propagate",
    "evolved_polynomial_check",
    "FIG_GHZ_GRID",
    "FIG_AMPLITUDE_GRID",
    "FIG_EVOLUTION_GRID",
]


@dataclasses.dataclass(frozen=True)
class GhzParams:
    """Squeezing r and mixing g of the three-mode GHZ-type family."""

    r: float
    g: float = 0.0

    def __post_init__(self):
        if self.r < 0:
            raise ValidationError("squeezing r must be >= 0")
        if self.g < 0:
            raise ValidationError("mixing g must be >= 0")


@dataclasses.dataclass(frozen=True)
class CpsTsvsParams:
    """Squeezing and subtraction amplitudes of the CPS-TSVS state.

    alpha and beta weight the single-photon subtraction across the two
    modes and must satisfy |alpha|^2 + |beta|^2 = 1.
    """

    r: float
    alpha: complex
    beta: complex

    def __post_init__(self):
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1.0) > 1e-9:
            raise ValidationError(
                "|alpha|^2 + |beta|^2 must equal 1, got %.12f" % norm
            )


@dataclasses.dataclass(frozen=True)
class ThermalChannel:
    """Markovian loss channel with thermal mean photon number n_th.

    Every mode couples at the same rate gamma to its own bath; the drift
    and diffusion matrices are the scalar multiples gamma/2 * I and
    gamma*(1+2*n_th)/4 * I of the identity.
    """

    gamma: float
    n_th: float = 0.0

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValidationError("coupling rate gamma must be > 0")
        if self.n_th < 0:
            raise ValidationError("mean photon number n_th must be >= 0")

    def drift(self, n):
        return 0.5 * self.gamma * np.eye(2 * n)

    def diffusion(self, n):
        return 0.25 * self.gamma * (1.0 + 2.0 * self.n_th) * np.eye(2 * n)

    @property
    def stationary_variance(self):
        """Per-quadrature variance (1+2*n_th)/2 of the fixed point."""
        return 0.5 * (1.0 + 2.0 * self.n_th)


def ghz_state(p):
    """Covariance of the three-mode GHZ-type family.

    V = V0(r) + g*I with V0 carrying q-q couplings -sinh(2r)/4 and p-p
    couplings +sinh(2r)/4 between every mode pair.  Physical for all
    r, g >= 0; pure only at r = 0 (see ghz_symplectic_spectrum).
    """
    a = 0.5 * (np.exp(2.0 * p.r) + np.cosh(2.0 * p.r))
    b = 0.5 * (np.exp(-2.0 * p.r) + np.cosh(2.0 * p.r))
    c = 0.5 * np.sinh(2.0 * p.r)
    V = np.zeros((6, 6))
    for m in range(3):
        V[2 * m, 2 * m] = a
        V[2 * m + 1, 2 * m + 1] = b
        for l in range(3):
            if l != m:
                V[2 * m, 2 * l] = -c
                V[2 * m + 1, 2 * l + 1] = c
    return GaussianEnvelope(0.5 * V + p.g * np.eye(6))


def ghz_symplectic_spectrum(p):
    """Closed-form symplectic eigenvalues of ghz_state(p).

    The circulant q and p blocks share the eigenbasis {(1,1,1), its
    complement}, so each symplectic eigenvalue is the geometric mean of
    a g-shifted q eigenvalue and its p partner.  At g = 0 the spectrum
    is {1/2, 1/2, sqrt(3e^{4r} + 3e^{-4r} + 10)/8}: the family is mixed
    for every r > 0.
    """
    ep, em = np.exp(2.0 * p.r), np.exp(-2.0 * p.r)
    sym = np.sqrt(((ep + 3.0 * em) / 8.0 + p.g) * ((3.0 * ep + em) / 8.0 + p.g))
    rest = np.sqrt((0.5 * ep + p.g) * (0.5 * em + p.g))
    return np.array(sorted([rest, rest, sym]))


def cps_tsvs_state(p):
    """Coherently photon-subtracted two-mode squeezed vacuum.

    Wigner function W = F * Gaussian with V = diag(e^{-2r}, e^{2r},
    e^{-2r}, e^{2r})/2 and the quadratic F obtained by applying
    (alpha a_1 + beta a_2) to the locally squeezed vacuum.
    """
    r = p.r
    V = 0.5 * np.diag(np.exp([-2.0 * r, 2.0 * r, -2.0 * r, 2.0 * r]))
    aa = abs(p.alpha) ** 2
    bb = abs(p.beta) ** 2
    w = np.conj(p.alpha) * p.beta
    ep, em = np.exp(2.0 * r), np.exp(-2.0 * r)
    # coordinates (x1, p1, x2, p2)
    terms = {
        (2, 0, 0, 0): 2.0 * ep * aa,
        (0, 2, 0, 0): 2.0 * em * aa,
        (0, 0, 2, 0): 2.0 * ep * bb,
        (0, 0, 0, 2): 2.0 * em * bb,
        (1, 0, 1, 0): 4.0 * ep * w.real,
        (0, 1, 0, 1): 4.0 * em * w.real,
        (1, 0, 0, 1): -4.0 * w.imag,
        (0, 1, 1, 0): 4.0 * w.imag,
        (0, 0, 0, 0): -1.0,
    }
    F = MultiPoly(4, terms)
    return PolyGaussianState(GaussianEnvelope(V), F)


def _channel_pieces(state, ch, t):
    """Rescale matrix M and smoothing kernel C of the evolved polynomial.

    With sigma_e = (e^{gamma t} - 1)(1+2n_th)/2,
      M = e^{gamma t / 2} (I + sigma_e V0^{-1})^{-1},
      C = (V0^{-1} + I/sigma_e)^{-1},
    and F(t) = [heat-smoothed F with kernel C] composed with M.
    """
    V0 = state.cov
    d = V0.shape[0]
    decay = np.exp(-ch.gamma * t)
    sigma_e = (1.0 / decay - 1.0) * ch.stationary_variance
    V0_inv = np.linalg.inv(V0)
    M = np.exp(0.5 * ch.gamma * t) * np.linalg.inv(
        np.eye(d) + sigma_e * V0_inv
    )
    C = np.linalg.inv(V0_inv + np.eye(d) / sigma_e)
    return M, C


def green_propagate(state, ch, t):
    """Propagate a polynomial-Gaussian state through the thermal channel.

    The Gaussian Green function of the underlying diffusion equation
    contracts the envelope, V(t) = e^{-gamma t} V(0)
    + (1 - e^{-gamma t}) (1+2n_th)/2 * I, and turns the polynomial into
    a heat-smoothed, linearly rescaled copy of itself.  Exact for any
    polynomial degree; degree never grows.
    """
    if t < 0:
        raise ValidationError("evolution time t must be >= 0")
    state = state if isinstance(state, PolyGaussianState) else PolyGaussianState(state)
    if t == 0:
        return state
    n = state.n
    decay = np.exp(-ch.gamma * t)
    V_t = decay * state.cov + (1.0 - decay) * ch.stationary_variance * np.eye(2 * n)
    mean_t = None
    if state.mean is not None:
        mean_t = np.sqrt(decay) * state.mean
    envelope = GaussianEnvelope(V_t, mean_t)
    poly = state.poly
    if poly.is_constant():
        return PolyGaussianState(envelope, poly)
    M, C = _channel_pieces(state, ch, t)
    evolved = heat_smoothed(poly, C).affine_substitute(M, np.zeros(2 * n))
    return PolyGaussianState(envelope, evolved)


def evolved_polynomial_check(state, ch, t):
    """Cross-check the propagated polynomial against its quadratic closed form.

    For degree <= 2 the smoothing collapses to a constant trace
    correction, F(t)(x) = F(Mx) + tr(C_c H)/2 with H the Hessian of the
    e^{gamma t/2}-rescaled polynomial at the origin and
    C_c = e^{-gamma t} C.  Returns the maximum absolute coefficient
    deviation between the two routes.
    """
    state = state if isinstance(state, PolyGaussianState) else PolyGaussianState(state)
    poly = state.poly
    if poly.degree > 2:
        raise ValidationError("closed form requires a polynomial of degree <= 2")
    if t == 0:
        return 0.0
    d = 2 * state.n
    general = green_propagate(state, ch, t).poly

    M, C = _channel_pieces(state, ch, t)
    scale = np.exp(0.5 * ch.gamma * t)
    rescaled = poly.affine_substitute(scale * np.eye(d), np.zeros(d))
    trace_term = 0.0
    for a in range(d):
        for b in range(d):
            second = rescaled.derivative(a).derivative(b)
            trace_term += np.exp(-ch.gamma * t) * C[a, b] * second.eval(np.zeros(d))
    closed = poly.affine_substitute(M, np.zeros(d)) + MultiPoly.constant(
        d, 0.5 * trace_term
    )

    diff = general + closed * (-1.0)
    if diff.is_zero():
        return 0.0
    return float(max(abs(v) for v in diff.terms.values()))


def _grid(stop, step):
    return np.round(np.arange(0.0, stop + 0.5 * step, step), 10)


# Parameter grids of the survey figures.  Axis ranges are reconstruction
# choices; the sources print no numeric tables.
FIG_GHZ_GRID = {"g": _grid(1.2, 0.02), "r": _grid(1.2, 0.02)}
FIG_AMPLITUDE_GRID = {"alpha_abs": _grid(1.0, 0.02)}
FIG_EVOLUTION_GRID = {"gamma_t": _grid(3.0, 0.05), "n_th": (2.0, 4.0)}
