"""Separability hierarchy tau_{k,n} for polynomial-Gaussian Wigner functions.

The witness compares the modulus of one off-diagonal product-state matrix
element against a weighted sum over bipartitions of geometric means of
diagonal elements:

    tau = e^{-alpha/2} |f_off| / det(S1 + S2)^{1/4}
          - sum_j a_j e^{-beta_j/4} sqrt(f_{1j} f_{2j})

A positive value certifies that the state is at least k-partite entangled
for the coefficient scheme a_j of level k; tau <= 0 is inconclusive.
Every f is a Gaussian expectation of the polynomial Wigner factor and is
evaluated exactly through the truncating heat-kernel series.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import NumericalFailureError, ValidationError
from .polynomials import (
    MultiPoly,
    PolyGaussianState,
    QuadraticKernel,
    as_poly_state,
    heat_smoothed,
)
from .probes import (
    GaussianWeylSymbol,
    ProbeSet,
    composite_offdiag_moments,
    enumerate_bipartitions,
    permuted_moments,
)
from .symplectic import GaussianEnvelope, symplectic_form

NEGATIVE_CLAMP = 1e-10


@dataclass(frozen=True)
class CoefficientScheme:
    """Bipartition weights a_j for detection level k among n modes.

    k = n (all weights 1) certifies genuine n-partite entanglement;
    k = 2 (all weights 1/(2^(n-1) - 1)) certifies any entanglement.
    """

    k: int
    n: int
    values: tuple
    label: str = "custom"

    def __post_init__(self):
        if not (2 <= self.k <= self.n):
            raise ValidationError("need 2 <= k <= n, got k=%d n=%d" % (self.k, self.n))
        vals = tuple(float(v) for v in self.values)
        if len(vals) != 2 ** (self.n - 1) - 1:
            raise ValidationError(
                "scheme needs %d coefficients, got %d"
                % (2 ** (self.n - 1) - 1, len(vals))
            )
        if any(v < 0.0 for v in vals):
            raise ValidationError("coefficients must be nonnegative")
        object.__setattr__(self, "values", vals)

    @classmethod
    def genuine(cls, n):
        """Level k = n: every bipartition weighted 1."""
        return cls(k=n, n=n, values=(1.0,) * (2 ** (n - 1) - 1), label="genuine")

    @classmethod
    def bipartite(cls, n):
        """Level k = 2: uniform weights 1/(2^(n-1) - 1)."""
        count = 2 ** (n - 1) - 1
        return cls(k=2, n=n, values=(1.0 / count,) * count, label="bipartite")

    @classmethod
    def uniform(cls, k, n):
        """Uniform heuristic for intermediate levels 2 < k < n.

        A mixture component that is at most (k-1)-partite entangled factors
        into at least ceil(n/(k-1)) groups and is therefore separable with
        respect to at least 2^(ceil(n/(k-1)) - 1) - 1 bipartitions; weighting
        every bipartition by the reciprocal of that count keeps the witness
        sound (no false positives), though sharper non-uniform tables exist
        and can be supplied via ``custom``.  Matches the exact endpoints at
        k = 2 and k = n.
        """
        groups = math.ceil(n / (k - 1))
        count = 2 ** (groups - 1) - 1
        label = "uniform-heuristic" if 2 < k < n else ("bipartite" if k == 2 else "genuine")
        return cls(k=k, n=n, values=(1.0 / count,) * (2 ** (n - 1) - 1), label=label)

    @classmethod
    def custom(cls, k, n, table):
        """User-supplied weights, one per canonical bipartition (index order)."""
        return cls(k=k, n=n, values=tuple(table), label="custom")

    @property
    def total(self):
        return sum(self.values)


@dataclass(frozen=True)
class BipartitionTerm:
    """One subtracted term: a_j times the geometric-mean diagonal element."""

    index: int
    coefficient: float
    value: float


@dataclass(frozen=True)
class HierarchyResult:
    value: float
    first_term: float
    per_bipartition: tuple
    probes: ProbeSet

    def subtrahend(self):
        return sum(t.value for t in self.per_bipartition)


def _complex_inv(S):
    return np.linalg.inv(np.asarray(S, dtype=complex))


def _log_abs_det(S):
    """log |det S| for real or complex matrices."""
    return float(np.linalg.slogdet(np.asarray(S))[1])


def _inv_sqrt_det(S):
    """det(S)^(-1/2) via per-eigenvalue principal square roots.

    Valid branch for complex symmetric matrices with positive-definite
    real part (all eigenvalues sit in the right half plane).
    """
    lam = np.linalg.eigvals(np.asarray(S, dtype=complex))
    return np.prod(1.0 / np.sqrt(lam))


def offdiag_exponent_alpha(ps, sym=None):
    """alpha = Re(X^T sigma^-1 X) + dX^T J^T Re(sigma) J dX for |Phi2><Phi1|."""
    if sym is None:
        sym = composite_offdiag_moments(ps)
    X = sym.mean
    quad = X @ np.linalg.solve(np.asarray(sym.sigma), X)
    dX = ps.x_phi1 - ps.x_phi2
    J = symplectic_form(ps.n)
    return float(quad.real + dX @ J.T @ sym.sigma.real @ J @ dX)


def diag_exponent_beta(sym1, sym2):
    """beta_j = X1^T S1^-1 X1 + X2^T S2^-1 X2 for the swapped projectors."""
    b = 0.0
    for sym in (sym1, sym2):
        X = sym.mean.real
        b += float(X @ np.linalg.solve(sym.sigma.real, X))
    return b


def _kernel_for(V_inv, sym):
    Sinv = _complex_inv(sym.sigma)
    M = np.linalg.inv(V_inv + Sinv)
    c = Sinv @ np.asarray(sym.mean, dtype=complex)
    return QuadraticKernel(M=M, c=c)


def _f_pieces(poly, V, V_inv, sym):
    """(log-scale real exponent, polynomial factor) of f for one symbol.

    f = exp(piece) * polyfactor / 1, where piece collects
    Re(c^T M c)/2 - log|det(sigma + V)|/2 and polyfactor is the
    heat-smoothed polynomial at M c (complex in the off-diagonal case).
    """
    kernel = _kernel_for(V_inv, sym)
    Mc = kernel.M @ kernel.c
    expo = 0.5 * np.dot(kernel.c, Mc)
    q = heat_smoothed(poly, kernel.M)
    val = q.eval(Mc)
    logdet = _log_abs_det(np.asarray(sym.sigma) + V)
    return float(expo.real) - 0.5 * logdet, complex(val), float(expo.imag)


def _real_poly_factor(val, context):
    if abs(val.imag) > 1e-8 * max(1.0, abs(val)):
        raise NumericalFailureError(
            "diagonal element %s has non-real polynomial factor %r" % (context, val)
        )
    v = val.real
    if v < -NEGATIVE_CLAMP * max(1.0, abs(v)):
        raise NumericalFailureError(
            "diagonal element %s is negative beyond tolerance: %r" % (context, v)
        )
    return max(v, 0.0)


def _centered(state, ps):
    """Reduce a displaced state to zero mean by shifting probes and polynomial."""
    state = as_poly_state(state)
    if np.abs(state.mean).max() == 0.0:
        return state, ps
    poly = state.poly.shift(state.mean) if state.poly.degree else state.poly
    env = GaussianEnvelope(state.cov, physical=state.envelope.physical)
    return PolyGaussianState(env, poly), ps.shifted(state.mean)


def _tau_core(state, ps, cs, gaussian_only):
    state = as_poly_state(state)
    if ps.n != state.n:
        raise ValidationError("probe set has %d modes, state has %d" % (ps.n, state.n))
    if cs.n != state.n:
        raise ValidationError("coefficient scheme is for n=%d, state has n=%d" % (cs.n, state.n))
    state, ps = _centered(state, ps)
    if gaussian_only:
        if not state.poly.is_constant():
            raise ValidationError("tau_gaussian needs a Gaussian state (constant F)")
        const = state.poly.constant_value()
        if abs(const - 1.0) > 1e-12:
            raise ValidationError("Gaussian state polynomial must be 1")
    V = state.cov
    V_inv = np.linalg.inv(V)
    poly = state.poly

    sym_off = composite_offdiag_moments(ps)
    alpha = offdiag_exponent_alpha(ps, sym_off)
    if gaussian_only:
        Sinv = _complex_inv(sym_off.sigma)
        M = np.linalg.inv(V_inv + Sinv)
        c = Sinv @ sym_off.mean
        log_off = float((0.5 * c @ M @ c).real) - 0.5 * _log_abs_det(sym_off.sigma + V)
        off_factor = 1.0
    else:
        log_off, val_off, _ = _f_pieces(poly, V, V_inv, sym_off)
        off_factor = abs(val_off)
    log_quarter = 0.25 * _log_abs_det(ps.sigma_phi1() + ps.sigma_phi2())
    first = math.exp(-0.5 * alpha + log_off - log_quarter) * off_factor

    terms = []
    for b, a in zip(enumerate_bipartitions(state.n), cs.values):
        sym1, sym2 = permuted_moments(ps, b)
        beta = diag_exponent_beta(sym1, sym2)
        if gaussian_only:
            logs = []
            for sym in (sym1, sym2):
                Sr = sym.sigma.real
                Xr = sym.mean.real
                M = np.linalg.inv(V_inv + np.linalg.inv(Sr))
                cr = np.linalg.solve(Sr, Xr)
                logs.append(0.5 * cr @ M @ cr - 0.5 * _log_abs_det(Sr + V))
            pair = math.exp(-0.25 * beta + 0.5 * (logs[0] + logs[1]))
        else:
            l1, v1, _ = _f_pieces(poly, V, V_inv, sym1)
            l2, v2, _ = _f_pieces(poly, V, V_inv, sym2)
            q1 = _real_poly_factor(v1, "bipartition %d (first)" % b.index)
            q2 = _real_poly_factor(v2, "bipartition %d (second)" % b.index)
            pair = math.exp(-0.25 * beta + 0.5 * (l1 + l2)) * math.sqrt(q1 * q2)
        terms.append(BipartitionTerm(index=b.index, coefficient=a, value=a * pair))

    total = first - sum(t.value for t in terms)
    return HierarchyResult(
        value=float(total),
        first_term=float(first),
        per_bipartition=tuple(terms),
        probes=ps,
    )


def tau_general(state, ps, cs):
    """Hierarchy value for a polynomial-Gaussian state (exact evaluation)."""
    return _tau_core(state, ps, cs, gaussian_only=False)


def tau_gaussian(state, ps, cs):
    """Hierarchy value for a Gaussian state through the closed-form elements."""
    if isinstance(state, GaussianEnvelope):
        state = PolyGaussianState(state)
    return _tau_core(state, ps, cs, gaussian_only=True)


def tau_symmetric(state, X, Sigma, cs):
    """Closed form under the symmetric probe identification.

    Probe means are X for Phi1 and -X for Phi2, with one shared
    block-diagonal pure covariance Sigma:

        tau~ = [exp(-2 X^T J^T (Sigma^-1 + V^-1)^-1 J X)
                - sum_j a_j exp(-(P_j X)^T (Sigma + V)^-1 (P_j X) / 2)]
               / sqrt(det(Sigma + V))

    Requires a zero-mean Gaussian state; the value is invariant under
    displacements once probe means are re-centered, so strip the mean
    first (see GaussianEnvelope.centered).
    """
    if isinstance(state, PolyGaussianState):
        if not state.poly.is_constant():
            raise ValidationError("tau_symmetric applies to Gaussian states only")
        state = state.envelope
    if not isinstance(state, GaussianEnvelope):
        state = GaussianEnvelope(state)
    if np.abs(state.mean).max() > 0.0:
        raise ValidationError("tau_symmetric needs a zero-mean state")
    n = state.n
    X = np.asarray(X, dtype=float)
    if X.shape != (2 * n,):
        raise ValidationError("displacement must have length 2n")
    Sigma = np.asarray(Sigma, dtype=float)
    if Sigma.shape != (2 * n, 2 * n):
        raise ValidationError("Sigma must be 2n x 2n")
    off = Sigma.copy()
    for m in range(n):
        block = Sigma[2 * m : 2 * m + 2, 2 * m : 2 * m + 2]
        det = block[0, 0] * block[1, 1] - block[0, 1] * block[1, 0]
        if abs(det - 0.25) > 1e-9 * max(1.0, np.abs(block).max() ** 2):
            raise ValidationError("Sigma blocks must have det 1/4 (pure probes)")
        off[2 * m : 2 * m + 2, 2 * m : 2 * m + 2] = 0.0
    if np.abs(off).max() > 1e-12 * max(1.0, np.abs(Sigma).max()):
        raise ValidationError("Sigma must be block diagonal over modes")
    if cs.n != n:
        raise ValidationError("coefficient scheme is for n=%d, state has n=%d" % (cs.n, n))
    signs = [b.sign_vector() for b in enumerate_bipartitions(n)]
    return _tau_symmetric_raw(
        state.cov, np.linalg.inv(state.cov), X, Sigma, cs.values, signs, symplectic_form(n)
    )


def _tau_symmetric_raw(V, V_inv, X, Sigma, coeffs, sign_vectors, J):
    """Fast path used by the optimizer; no validation."""
    SV = Sigma + V
    SV_inv = np.linalg.inv(SV)
    logdet = float(np.linalg.slogdet(SV)[1])
    Minv = np.linalg.inv(np.linalg.inv(Sigma) + V_inv)
    JX = J @ X
    first = -2.0 * JX @ Minv @ JX
    total = math.exp(first - 0.5 * logdet)
    for s, a in zip(sign_vectors, coeffs):
        if a == 0.0:
            continue
        Y = s * X
        total -= a * math.exp(-0.5 * (Y @ SV_inv @ Y) - 0.5 * logdet)
    return total


def weyl_matrix_element(state, sym, branch_safe=True):
    """<Phi|rho|Psi> for the Gaussian Weyl symbol of |Psi><Phi| (exact route).

    element = e^{lognorm} (2 pi)^n det(V^-1 + S^-1)^{-1/2} det(V)^{-1/2}
              e^{-X^T S^-1 X / 2} [exp((1/2)(d + S^-1 X)^T M (d + S^-1 X)) F](0)

    with M = (V^-1 + S^-1)^-1.  The complex determinant branch follows the
    per-eigenvalue principal square root, which is the analytic
    continuation from real positive-definite matrices.
    """
    state = as_poly_state(state)
    if np.abs(state.mean).max() != 0.0:
        poly = state.poly.shift(state.mean) if state.poly.degree else state.poly
        sym = GaussianWeylSymbol(
            mean=np.asarray(sym.mean) - state.mean,
            sigma=sym.sigma,
            lognorm=sym.lognorm,
        )
        state = PolyGaussianState(
            GaussianEnvelope(state.cov, physical=state.envelope.physical), poly
        )
    V = state.cov
    V_inv = np.linalg.inv(V)
    Sinv = _complex_inv(sym.sigma)
    A = V_inv + Sinv
    kernel = QuadraticKernel(M=np.linalg.inv(A), c=Sinv @ sym.mean)
    Mc = kernel.M @ kernel.c
    q = heat_smoothed(state.poly, kernel.M)
    X = np.asarray(sym.mean, dtype=complex)
    expo = (
        complex(sym.lognorm)
        - 0.5 * X @ Sinv @ X
        + 0.5 * kernel.c @ Mc
        - 0.5 * _log_abs_det(V)
    )
    pref = (2.0 * math.pi) ** state.n * _inv_sqrt_det(A)
    return pref * np.exp(expo) * q.eval(Mc)
