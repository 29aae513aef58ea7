"""Sparse multivariate polynomials and Gaussian-operator evaluation.

The central identity used throughout the hierarchy is

    [exp((1/2)(d+c)^T M (d+c)) p](0) = exp(c^T M c / 2) * q(M c)

with d the gradient operator and q = exp((1/2) d^T M d) p; the heat-kernel
series truncates after floor(deg p / 2) applications, so everything here
is exact polynomial algebra over complex coefficients.
"""

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np

from .errors import OracleInapplicableError, ValidationError
from .symplectic import GaussianEnvelope

PRUNE_EPS = 1e-15


class MultiPoly:
    """Polynomial in nvars real variables, stored as exponent tuple -> coefficient."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars, terms=None):
        self.nvars = int(nvars)
        clean = {}
        for expo, coeff in (terms or {}).items():
            expo = tuple(int(e) for e in expo)
            if len(expo) != self.nvars or any(e < 0 for e in expo):
                raise ValidationError("bad exponent tuple %r" % (expo,))
            c = complex(coeff)
            if abs(c) > PRUNE_EPS:
                clean[expo] = clean.get(expo, 0.0) + c
        self.terms = {e: c for e, c in clean.items() if abs(c) > PRUNE_EPS}

    @classmethod
    def constant(cls, nvars, value):
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, nvars, i):
        expo = [0] * nvars
        expo[i] = 1
        return cls(nvars, {tuple(expo): 1.0})

    @classmethod
    def zero(cls, nvars):
        return cls(nvars, {})

    @property
    def degree(self):
        return max((sum(e) for e in self.terms), default=0)

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return self.degree == 0

    def constant_value(self):
        return self.terms.get((0,) * self.nvars, 0.0 + 0.0j)

    def __add__(self, other):
        if np.isscalar(other):
            other = MultiPoly.constant(self.nvars, other)
        if other.nvars != self.nvars:
            raise ValidationError("variable count mismatch")
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0.0) + c
        return MultiPoly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if np.isscalar(other):
            other = MultiPoly.constant(self.nvars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if np.isscalar(other):
            return MultiPoly(
                self.nvars, {e: c * other for e, c in self.terms.items()}
            )
        if other.nvars != self.nvars:
            raise ValidationError("variable count mismatch")
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0.0) + c1 * c2
        return MultiPoly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            raise ValidationError("negative power")
        out = MultiPoly.constant(self.nvars, 1.0)
        for _ in range(int(k)):
            out = out * self
        return out

    def conjugate(self):
        """Complex-conjugate coefficients (variables are real)."""
        return MultiPoly(
            self.nvars, {e: np.conj(c) for e, c in self.terms.items()}
        )

    def real_part(self):
        return (self + self.conjugate()) * 0.5

    def derivative(self, i):
        out = {}
        for e, c in self.terms.items():
            if e[i] > 0:
                d = list(e)
                d[i] -= 1
                out[tuple(d)] = out.get(tuple(d), 0.0) + c * e[i]
        return MultiPoly(self.nvars, out)

    def eval(self, x):
        x = np.asarray(x)
        if x.shape != (self.nvars,):
            raise ValidationError("point has wrong dimension")
        total = 0.0 + 0.0j
        for e, c in self.terms.items():
            v = c
            for xi, ei in zip(x, e):
                if ei:
                    v = v * xi**ei
            total += v
        return total

    def eval_many(self, pts):
        """Evaluate at an (N, nvars) array of points; returns (N,) complex."""
        pts = np.asarray(pts)
        maxdeg = [0] * self.nvars
        for e in self.terms:
            for i, ei in enumerate(e):
                maxdeg[i] = max(maxdeg[i], ei)
        pows = []
        for i in range(self.nvars):
            col = pts[:, i]
            table = [np.ones(len(pts), dtype=col.dtype)]
            for _ in range(maxdeg[i]):
                table.append(table[-1] * col)
            pows.append(table)
        total = np.zeros(len(pts), dtype=complex)
        for e, c in self.terms.items():
            v = None
            for i, ei in enumerate(e):
                if ei:
                    v = pows[i][ei] if v is None else v * pows[i][ei]
            total += c if v is None else c * v
        return total

    def affine_substitute(self, A, b):
        """Compose with the affine map x -> A x + b: returns p(Ax + b)."""
        A = np.asarray(A)
        b = np.asarray(b)
        if A.shape != (self.nvars, self.nvars) or b.shape != (self.nvars,):
            raise ValidationError("affine map has wrong shape")
        lines = []
        for i in range(self.nvars):
            terms = {(0,) * self.nvars: complex(b[i])}
            for jj in range(self.nvars):
                if A[i, jj] != 0:
                    e = [0] * self.nvars
                    e[jj] = 1
                    terms[tuple(e)] = complex(A[i, jj])
            lines.append(MultiPoly(self.nvars, terms))
        powers = [{0: MultiPoly.constant(self.nvars, 1.0)} for _ in lines]

        def line_power(i, k):
            tab = powers[i]
            if k not in tab:
                tab[k] = line_power(i, k - 1) * lines[i]
            return tab[k]

        out = MultiPoly.zero(self.nvars)
        for e, c in self.terms.items():
            term = MultiPoly.constant(self.nvars, c)
            for i, ei in enumerate(e):
                if ei:
                    term = term * line_power(i, ei)
            out = out + term
        return out

    def shift(self, b):
        return self.affine_substitute(np.eye(self.nvars), b)

    def second_contraction(self, M):
        """sum_ab M[a,b] d^2 p / dx_a dx_b."""
        M = np.asarray(M)
        out = {}
        for e, c in self.terms.items():
            for a in range(self.nvars):
                if e[a] == 0:
                    continue
                for b in range(self.nvars):
                    Mab = M[a, b]
                    if Mab == 0:
                        continue
                    if a == b:
                        if e[a] < 2:
                            continue
                        factor = e[a] * (e[a] - 1)
                        d = list(e)
                        d[a] -= 2
                    else:
                        if e[b] == 0:
                            continue
                        factor = e[a] * e[b]
                        d = list(e)
                        d[a] -= 1
                        d[b] -= 1
                    key = tuple(d)
                    out[key] = out.get(key, 0.0) + c * factor * Mab
        return MultiPoly(self.nvars, out)

    def __repr__(self):
        return "MultiPoly(nvars=%d, nterms=%d, degree=%d)" % (
            self.nvars,
            len(self.terms),
            self.degree,
        )


def poly_eval(p, x):
    return p.eval(x)


def poly_affine_substitute(p, A, b):
    return p.affine_substitute(A, b)


@dataclass(frozen=True)
class QuadraticKernel:
    """Kernel (M, c) of the operator exp((1/2)(d+c)^T M (d+c))."""

    M: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        M = np.asarray(self.M, dtype=complex)
        c = np.asarray(self.c, dtype=complex)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or c.shape != (M.shape[0],):
            raise ValidationError("kernel shapes are inconsistent")
        scale = max(1.0, np.abs(M).max())
        if np.abs(M - M.T).max() > 1e-10 * scale:
            raise ValidationError("kernel matrix must be symmetric")
        M = 0.5 * (M + M.T)
        M.setflags(write=False)
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "c", c)


def heat_smoothed(p, M):
    """exp((1/2) d^T M d) p, summed exactly (series truncates)."""
    out = p
    term = p
    for j in range(1, p.degree // 2 + 1):
        term = term.second_contraction(M) * (0.5 / j)
        if term.is_zero():
            break
        out = out + term
    return out


def apply_gaussian_operator(p, kernel):
    """[exp((1/2)(d+c)^T M (d+c)) p](0) as a complex number."""
    if p.nvars != kernel.c.shape[0]:
        raise ValidationError("polynomial and kernel dimensions differ")
    Mc = kernel.M @ kernel.c
    q = heat_smoothed(p, kernel.M)
    return np.exp(0.5 * np.dot(kernel.c, Mc)) * q.eval(Mc)


class PolyGaussianState:
    """n-mode state with Wigner function F(x) times a Gaussian envelope.

    W(x) = F(x) exp(-(x-mean)^T V^-1 (x-mean)/2) / ((2 pi)^n sqrt(det V)).
    F = 1 reproduces a plain Gaussian state.  Normalization of W is the
    caller's responsibility (integral checks live in the quadrature oracle).
    """

    def __init__(self, envelope, poly=None):
        if not isinstance(envelope, GaussianEnvelope):
            envelope = GaussianEnvelope(envelope)
        if poly is None:
            poly = MultiPoly.constant(2 * envelope.n, 1.0)
        if poly.nvars != 2 * envelope.n:
            raise ValidationError(
                "polynomial has %d variables, state needs %d"
                % (poly.nvars, 2 * envelope.n)
            )
        self.envelope = envelope
        self.poly = poly

    @property
    def n(self):
        return self.envelope.n

    @property
    def cov(self):
        return self.envelope.cov

    @property
    def mean(self):
        return self.envelope.mean

    def is_gaussian(self):
        return self.poly.is_constant()

    def __repr__(self):
        return "PolyGaussianState(n=%d, degree=%d)" % (self.n, self.poly.degree)


def as_poly_state(state):
    if isinstance(state, PolyGaussianState):
        return state
    return PolyGaussianState(state)


@lru_cache(maxsize=8)
def _gh_grid(dim, nodes):
    t, w = np.polynomial.hermite.hermgauss(nodes)
    grids = np.meshgrid(*([t] * dim), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    wgrids = np.meshgrid(*([w] * dim), indexing="ij")
    wts = np.ones(len(pts))
    for g in wgrids:
        wts = wts * g.ravel()
    pts.setflags(write=False)
    wts.setflags(write=False)
    return pts, wts


def _gauss_poly_integral(poly, A, b, c0, nodes):
    """integral of poly(x) exp(-x^T A x / 2 + b^T x + c0) over R^d.

    A may be complex symmetric; its real part must be positive definite.
    Gauss-Hermite quadrature after whitening by the Cholesky factor of
    Re A; the leftover imaginary quadratic/linear phase is evaluated at
    the nodes.
    """
    A = np.asarray(A, dtype=complex)
    b = np.asarray(b, dtype=complex)
    d = A.shape[0]
    AR = A.real.copy()
    try:
        L = np.linalg.cholesky(AR)
    except np.linalg.LinAlgError:
        raise OracleInapplicableError(
            "real part of the combined quadratic form is not positive definite"
        )
    mu = np.linalg.solve(AR, b.real)
    B = math.sqrt(2.0) * np.linalg.inv(L).T
    pts, wts = _gh_grid(d, nodes)
    X = mu[None, :] + pts @ B.T
    # real exponent collapses to a constant after the substitution
    const = 0.5 * np.dot(b.real, mu) + complex(c0).real
    AI = A.imag
    phase = np.zeros(len(X))
    if np.abs(AI).max() > 0:
        phase = phase - 0.5 * np.einsum("ni,ij,nj->n", X, AI, X)
    if np.abs(b.imag).max() > 0:
        phase = phase + X @ b.imag
    phase = phase + complex(c0).imag
    vals = poly.eval_many(X) * np.exp(1j * phase)
    detB = 2.0 ** (d / 2.0) / np.prod(np.diag(L))
    return math.exp(const) * detB * np.dot(wts, vals)


def quadrature_matrix_element(state, weyl, nodes=40):
    """(2 pi)^n integral W_state(x) W_weyl(x) dx by Gauss-Hermite quadrature.

    Independent numerical route for the probe matrix elements; supports
    n <= 2 only.  Accuracy is near machine precision for the polynomial
    degrees used here (>= 40 nodes per axis, moderate squeezing).
    """
    state = as_poly_state(state)
    if state.n > 2:
        raise OracleInapplicableError("quadrature oracle supports n <= 2")
    V = state.cov
    xbar = state.mean
    Vinv = np.linalg.inv(V)
    Sinv = np.linalg.inv(np.asarray(weyl.sigma, dtype=complex))
    X = np.asarray(weyl.mean, dtype=complex)
    A = Vinv + Sinv
    b = Vinv @ xbar + Sinv @ X
    c0 = -0.5 * (xbar @ Vinv @ xbar + X @ Sinv @ X)
    core = _gauss_poly_integral(state.poly, A, b, c0, nodes)
    logdetV = np.linalg.slogdet(V)[1]
    return np.exp(complex(weyl.lognorm) - 0.5 * logdetV) * core


def quadrature_wigner_integral(state, nodes=40):
    """integral of the full Wigner function, for normalization checks (n <= 2)."""
    state = as_poly_state(state)
    if state.n > 2:
        raise OracleInapplicableError("quadrature oracle supports n <= 2")
    V = state.cov
    xbar = state.mean
    Vinv = np.linalg.inv(V)
    core = _gauss_poly_integral(
        state.poly, Vinv, Vinv @ xbar, -0.5 * xbar @ Vinv @ xbar, nodes
    )
    logdetV = np.linalg.slogdet(V)[1]
    norm = (2.0 * math.pi) ** state.n * math.exp(0.5 * logdetV)
    return core / norm
