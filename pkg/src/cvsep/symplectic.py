"""Phase-space linear algebra for n-mode Gaussian covariance matrices.

Quadratures are ordered mode by mode, x = (q1, p1, ..., qn, pn), the
single-mode symplectic form is J1 = [[0, -1], [1, 0]], and the vacuum
covariance matrix is I/2.  A covariance matrix V describes a physical
quantum state exactly when every symplectic eigenvalue is >= 1/2.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
import math

import numpy as np

from .errors import (
    DegenerateSpectrumError,
    InvalidBipartitionError,
    ValidationError,
)

J1 = np.array([[0.0, -1.0], [1.0, 0.0]])
J1.setflags(write=False)

SYMMETRY_TOL = 1e-10
PHYSICALITY_TOL = 1e-9


@lru_cache(maxsize=None)
def symplectic_form(n):
    """Block-diagonal symplectic form J_n = J1 (+) ... (+) J1 for n modes."""
    if n < 1:
        raise ValidationError("mode count must be >= 1, got %r" % (n,))
    J = np.zeros((2 * n, 2 * n))
    for m in range(n):
        J[2 * m : 2 * m + 2, 2 * m : 2 * m + 2] = J1
    J.setflags(write=False)
    return J


def _as_cov(V, what="covariance matrix"):
    V = np.asarray(V, dtype=float)
    if V.ndim != 2 or V.shape[0] != V.shape[1] or V.shape[0] % 2 != 0:
        raise ValidationError("%s must be square with even dimension" % what)
    scale = max(1.0, np.abs(V).max())
    if np.abs(V - V.T).max() > SYMMETRY_TOL * scale:
        raise ValidationError("%s is not symmetric" % what)
    return 0.5 * (V + V.T)


def symplectic_eigenvalues(V):
    """Symplectic eigenvalues of a symmetric positive-definite matrix.

    Computed from the plain eigenvalues of J_n^T V, which come in pairs
    +/- i nu.  Returns the n values nu sorted ascending.
    """
    V = _as_cov(V)
    if np.linalg.eigvalsh(V).min() <= 0.0:
        raise ValidationError("covariance matrix is not positive definite")
    n = V.shape[0] // 2
    vals = np.linalg.eigvals(symplectic_form(n).T @ V)
    scale = np.abs(vals).max()
    if np.abs(vals.real).max() > 1e-8 * max(scale, 1e-300):
        raise DegenerateSpectrumError(
            "eigenvalues of J^T V are not purely imaginary "
            "(max real part %.3e)" % np.abs(vals.real).max()
        )
    # |imag| parts appear twice each; keep one representative per pair
    return np.sort(np.abs(vals.imag))[::2]


def min_symplectic_eigenvalue(V):
    return symplectic_eigenvalues(V)[0]


def is_physical(V, tol=PHYSICALITY_TOL):
    """True when V is a valid quantum covariance matrix (all nu >= 1/2)."""
    return min_symplectic_eigenvalue(V) >= 0.5 - tol


def _check_modes(modes, n):
    modes = sorted(set(int(m) for m in modes))
    if not modes:
        raise InvalidBipartitionError("transposed mode set is empty")
    if modes[0] < 0 or modes[-1] >= n:
        raise InvalidBipartitionError(
            "mode indices %r out of range for n=%d (zero-based)" % (modes, n)
        )
    if len(modes) == n:
        raise InvalidBipartitionError("transposing every mode is a no-op split")
    return modes


def partial_transpose(V, modes):
    """Partial transpose on the given zero-based modes: flips their p signs."""
    V = _as_cov(V)
    n = V.shape[0] // 2
    modes = _check_modes(modes, n)
    d = np.ones(2 * n)
    for m in modes:
        d[2 * m + 1] = -1.0
    return V * np.outer(d, d)


def ppt_separable(V, modes):
    """PPT verdict for the bipartition (modes | rest).

    Returns (separable, min_nu) where min_nu is the smallest symplectic
    eigenvalue of the partially transposed covariance matrix.  For
    1-vs-rest splits of Gaussian states the verdict is exact.
    """
    nu = min_symplectic_eigenvalue(partial_transpose(V, modes))
    return bool(nu >= 0.5 - PHYSICALITY_TOL), float(nu)


def symplectic_invariants_3mode(Vt):
    """Coefficients (D1, D2, D3) of lam^6 + D1 lam^4 + D2 lam^2 + D3 = 0,

    the characteristic polynomial of J_3^T Vt whose roots are +/- i nu.
    Each D_l is the sum of the principal minors of order 2l of J_3^T Vt.
    """
    Vt = _as_cov(Vt)
    if Vt.shape[0] != 6:
        raise ValidationError("expected a three-mode (6x6) matrix")
    W = symplectic_form(3).T @ Vt
    d1 = sum(
        np.linalg.det(W[np.ix_(idx, idx)]) for idx in combinations(range(6), 2)
    )
    d2 = sum(
        np.linalg.det(W[np.ix_(idx, idx)]) for idx in combinations(range(6), 4)
    )
    d3 = np.linalg.det(W)
    return float(d1), float(d2), float(d3)


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


class GaussianEnvelope:
    """Gaussian factor of a Wigner function: covariance V and mean vector.

    The full Wigner function is F(x) * exp(-(x-mean)^T V^-1 (x-mean) / 2)
    normalized by (2 pi)^n sqrt(det V), with F handled elsewhere.  When
    ``physical`` is true (the default) the constructor additionally checks
    nu_min >= 1/2 - 1e-9.
    """

    def __init__(self, cov, mean=None, physical=True):
        cov = _as_cov(cov)
        if np.linalg.eigvalsh(cov).min() <= 0.0:
            raise ValidationError("covariance matrix is not positive definite")
        self.n = cov.shape[0] // 2
        if mean is None:
            mean = np.zeros(2 * self.n)
        mean = np.asarray(mean, dtype=float)
        if mean.shape != (2 * self.n,):
            raise ValidationError(
                "mean must have length %d, got shape %r" % (2 * self.n, mean.shape)
            )
        if physical and not is_physical(cov):
            raise ValidationError(
                "covariance matrix violates the uncertainty relation "
                "(min symplectic eigenvalue %.6g < 1/2)"
                % min_symplectic_eigenvalue(cov)
            )
        self.cov = _frozen(cov)
        self.mean = _frozen(mean)
        self.physical = bool(physical)

    def symplectic_eigenvalues(self):
        return symplectic_eigenvalues(self.cov)

    def centered(self):
        """Copy with the mean vector set to zero."""
        return GaussianEnvelope(self.cov, None, physical=self.physical)

    def __repr__(self):
        return "GaussianEnvelope(n=%d, mean_norm=%.3g)" % (
            self.n,
            float(np.linalg.norm(self.mean)),
        )


def vacuum_envelope(n):
    return GaussianEnvelope(0.5 * np.eye(2 * n))


@dataclass(frozen=True)
class TwoModeStandardForm:
    """Two-mode covariance matrix (1/2) diag-block form with entries a, b, c, d.

    V = (1/2) [[a,0,c,0],[0,a,0,d],[c,0,b,0],[0,d,0,b]].
    """

    a: float
    b: float
    c: float
    d: float

    @property
    def matrix(self):
        a, b, c, d = self.a, self.b, self.c, self.d
        return 0.5 * np.array(
            [
                [a, 0.0, c, 0.0],
                [0.0, a, 0.0, d],
                [c, 0.0, b, 0.0],
                [0.0, d, 0.0, b],
            ]
        )

    def to_envelope(self, physical=True):
        return GaussianEnvelope(self.matrix, physical=physical)

    def tilde_invariants(self):
        """(D1~^2, D2~^2) for the partial transpose of this matrix.

        The partially transposed symplectic eigenvalues solve
        nu^4 - D1~^2 nu^2 + D2~^2 = 0 with
        D1~^2 = (a^2 + b^2 - 2 c d)/4 and D2~^2 = (ab - c^2)(ab - d^2)/16.
        """
        a, b, c, d = self.a, self.b, self.c, self.d
        d1 = 0.25 * (a * a + b * b - 2.0 * c * d)
        d2 = (a * b - c * c) * (a * b - d * d) / 16.0
        return d1, d2

    def tilde_spectrum(self):
        """Symplectic eigenvalues of the partial transpose, ascending."""
        d1, d2 = self.tilde_invariants()
        disc = d1 * d1 - 4.0 * d2
        if disc < -1e-12 * max(1.0, d1 * d1):
            raise DegenerateSpectrumError("complex nu~^2 for standard form")
        disc = math.sqrt(max(disc, 0.0))
        lo = 0.5 * (d1 - disc)
        hi = 0.5 * (d1 + disc)
        if lo < 0.0:
            raise DegenerateSpectrumError("negative nu~^2 for standard form")
        return np.array([math.sqrt(lo), math.sqrt(hi)])

    @classmethod
    def two_mode_squeezed_vacuum(cls, r):
        c2, s2 = math.cosh(2.0 * r), math.sinh(2.0 * r)
        return cls(a=c2, b=c2, c=s2, d=-s2)


@dataclass(frozen=True)
class ThreeModePureStandardForm:
    """Pure three-mode covariance matrix with balanced diagonal blocks.

    V = (1/2) times the symmetric matrix with per-mode diagonal blocks
    a_m I_2 and off-diagonal mode blocks diag(e+_{ml}, e-_{ml}).  Purity
    is not implied by the parameter set; check_purity() verifies it.
    """

    a1: float
    a2: float
    a3: float
    e12p: float
    e12m: float
    e13p: float
    e13m: float
    e23p: float
    e23m: float

    @property
    def matrix(self):
        a1, a2, a3 = self.a1, self.a2, self.a3
        V = np.zeros((6, 6))
        V[0, 0] = V[1, 1] = a1
        V[2, 2] = V[3, 3] = a2
        V[4, 4] = V[5, 5] = a3
        for (i, j), (ep, em) in {
            (0, 1): (self.e12p, self.e12m),
            (0, 2): (self.e13p, self.e13m),
            (1, 2): (self.e23p, self.e23m),
        }.items():
            V[2 * i, 2 * j] = V[2 * j, 2 * i] = ep
            V[2 * i + 1, 2 * j + 1] = V[2 * j + 1, 2 * i + 1] = em
        return 0.5 * V

    def to_envelope(self, physical=True):
        return GaussianEnvelope(self.matrix, physical=physical)

    def purity_defect(self):
        """max_m |nu_m - 1/2| over the symplectic spectrum."""
        return float(np.abs(symplectic_eigenvalues(self.matrix) - 0.5).max())

    def check_purity(self, tol=1e-6):
        defect = self.purity_defect()
        if defect > tol:
            raise ValidationError(
                "matrix is not pure: max |nu - 1/2| = %.3e" % defect
            )

    @classmethod
    def from_covariance(cls, V, tol=1e-9):
        """Read off the standard form from a conforming covariance matrix.

        Accepts any 6x6 covariance matrix whose q-p cross entries vanish
        and whose mode blocks are diagonal; per-mode squeezing (a local
        symplectic scaling q -> lam q, p -> p/lam) is applied first to
        balance each diagonal block.  Symplectic spectra of all partial
        transposes are unchanged by that balancing.
        """
        V = _as_cov(V)
        if V.shape[0] != 6:
            raise ValidationError("expected a three-mode (6x6) matrix")
        scale = np.abs(V).max()
        mask = np.zeros((6, 6), dtype=bool)
        for i in range(3):
            for j in range(3):
                mask[2 * i, 2 * j + 1] = True
                mask[2 * i + 1, 2 * j] = True
        if np.abs(V[mask]).max() > tol * scale:
            raise ValidationError(
                "covariance matrix has q-p cross terms; not in block form"
            )
        lam = np.ones(6)
        for m in range(3):
            lam[2 * m] = (V[2 * m + 1, 2 * m + 1] / V[2 * m, 2 * m]) ** 0.25
            lam[2 * m + 1] = 1.0 / lam[2 * m]
        Vb = V * np.outer(lam, lam)
        return cls(
            a1=2.0 * Vb[0, 0],
            a2=2.0 * Vb[2, 2],
            a3=2.0 * Vb[4, 4],
            e12p=2.0 * Vb[0, 2],
            e12m=2.0 * Vb[1, 3],
            e13p=2.0 * Vb[0, 4],
            e13m=2.0 * Vb[1, 5],
            e23p=2.0 * Vb[2, 4],
            e23m=2.0 * Vb[3, 5],
        )
