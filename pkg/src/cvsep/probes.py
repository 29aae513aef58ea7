"""Gaussian probe states, bipartitions, and composite Weyl-symbol moments.

A probe set holds 2n single-mode pure Gaussian states: modes 1..n build
the product state Phi1, modes n+1..2n build Phi2.  The off-diagonal
operator |Phi2><Phi1| has a Gaussian Weyl symbol with complex moments;
its per-mode normalization is known in modulus, which is all the
hierarchy uses (only |<Phi1|rho|Phi2>| enters).
"""

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np
from scipy.linalg import block_diag

from .errors import InvalidBipartitionError, ValidationError
from .symplectic import J1, symplectic_form

PROBE_DET_TOL = 1e-9


def rotation(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


class SingleModeProbe:
    """Pure single-mode Gaussian probe: 2x2 covariance with det = 1/4 and a mean."""

    def __init__(self, sigma, mean=(0.0, 0.0)):
        sigma = np.asarray(sigma, dtype=float)
        if sigma.shape != (2, 2):
            raise ValidationError("probe covariance must be 2x2")
        if abs(sigma[0, 1] - sigma[1, 0]) > 1e-10 * max(1.0, np.abs(sigma).max()):
            raise ValidationError("probe covariance must be symmetric")
        sigma = 0.5 * (sigma + sigma.T)
        det = sigma[0, 0] * sigma[1, 1] - sigma[0, 1] * sigma[1, 0]
        if sigma[0, 0] <= 0.0 or det <= 0.0:
            raise ValidationError("probe covariance must be positive definite")
        # det carries squared entry magnitude, so cancellation noise at
        # strong squeezing scales the tolerance the same way
        if abs(det - 0.25) > PROBE_DET_TOL * max(1.0, np.abs(sigma).max() ** 2):
            raise ValidationError(
                "probe covariance must describe a pure state "
                "(det = 1/4, got %.12g)" % det
            )
        mean = np.asarray(mean, dtype=float)
        if mean.shape != (2,):
            raise ValidationError("probe mean must have length 2")
        self.sigma = _frozen(sigma)
        self.mean = _frozen(mean)

    @classmethod
    def vacuum(cls, mean=(0.0, 0.0)):
        return cls(0.5 * np.eye(2), mean)

    @classmethod
    def squeezed(cls, s, theta=0.0, mean=(0.0, 0.0)):
        """Rotated squeezed vacuum: sigma = R diag(e^-2s, e^2s) R^T / 2."""
        R = rotation(theta)
        core = 0.5 * np.diag([math.exp(-2.0 * s), math.exp(2.0 * s)])
        return cls(R @ core @ R.T, mean)

    @classmethod
    def momentum_squeezed(cls, r, mean=(0.0, 0.0)):
        """sigma = diag(1/(4r), r); r -> 0 squeezes the momentum quadrature."""
        if r <= 0.0:
            raise ValidationError("squeezing parameter r must be positive")
        return cls(np.diag([0.25 / r, r]), mean)

    def displaced(self, mean):
        return SingleModeProbe(self.sigma, mean)

    def __repr__(self):
        return "SingleModeProbe(mean=%s)" % (np.round(self.mean, 6),)


class ProbeSet:
    """2n single-mode probes; the first n form Phi1, the last n form Phi2."""

    def __init__(self, probes):
        probes = tuple(probes)
        if len(probes) < 2 or len(probes) % 2 != 0:
            raise ValidationError("probe set needs an even count of >= 2 probes")
        if not all(isinstance(p, SingleModeProbe) for p in probes):
            raise ValidationError("probe set entries must be SingleModeProbe")
        self.probes = probes
        self.n = len(probes) // 2

    @classmethod
    def vacuum(cls, n):
        return cls([SingleModeProbe.vacuum() for _ in range(2 * n)])

    @classmethod
    def symmetric(cls, sigmas, X):
        """Shared per-mode covariances with opposite means X and -X."""
        X = np.asarray(X, dtype=float)
        n = len(sigmas)
        if X.shape != (2 * n,):
            raise ValidationError("displacement must have length 2n")
        first = [SingleModeProbe(s, X[2 * m : 2 * m + 2]) for m, s in enumerate(sigmas)]
        second = [
            SingleModeProbe(s, -X[2 * m : 2 * m + 2]) for m, s in enumerate(sigmas)
        ]
        return cls(first + second)

    def shifted(self, offset):
        """All probe means translated by -offset (used to center a displaced state)."""
        offset = np.asarray(offset, dtype=float)
        out = []
        for i, p in enumerate(self.probes):
            m = i % self.n
            out.append(SingleModeProbe(p.sigma, p.mean - offset[2 * m : 2 * m + 2]))
        return ProbeSet(out)

    @property
    def x_phi1(self):
        return np.concatenate([p.mean for p in self.probes[: self.n]])

    @property
    def x_phi2(self):
        return np.concatenate([p.mean for p in self.probes[self.n :]])

    def sigma_phi1(self):
        return block_diag(*[p.sigma for p in self.probes[: self.n]])

    def sigma_phi2(self):
        return block_diag(*[p.sigma for p in self.probes[self.n :]])

    def __repr__(self):
        return "ProbeSet(n=%d)" % self.n


@dataclass(frozen=True)
class Bipartition:
    """Binary split of n modes, encoded by v with v[0] = 0, not all zero."""

    index: int
    v: tuple

    def __post_init__(self):
        v = tuple(int(b) for b in self.v)
        if not v or v[0] != 0 or any(b not in (0, 1) for b in v):
            raise InvalidBipartitionError("bipartition vector must start with 0")
        if not any(v):
            raise InvalidBipartitionError("bipartition vector must not be all zero")
        object.__setattr__(self, "v", v)

    @property
    def n(self):
        return len(self.v)

    @property
    def group0(self):
        return tuple(m for m, b in enumerate(self.v) if b == 0)

    @property
    def group1(self):
        return tuple(m for m, b in enumerate(self.v) if b == 1)

    def sign_matrix(self):
        """P_j = direct sum over modes of (-1)^(v_m) I_2."""
        d = np.repeat([1.0 if b == 0 else -1.0 for b in self.v], 2)
        return np.diag(d)

    def sign_vector(self):
        return np.repeat([1.0 if b == 0 else -1.0 for b in self.v], 2)


@lru_cache(maxsize=32)
def enumerate_bipartitions(n):
    """All 2^(n-1) - 1 canonical bipartitions of n modes, index 1 upward.

    v[1:] runs through the binary representation of the index, most
    significant bit first, so the order is lexicographic.
    """
    if n < 2:
        raise InvalidBipartitionError("bipartitions need n >= 2 modes")
    out = []
    for j in range(1, 2 ** (n - 1)):
        bits = tuple((j >> (n - 2 - i)) & 1 for i in range(n - 1))
        out.append(Bipartition(index=j, v=(0,) + bits))
    return tuple(out)


@dataclass(frozen=True)
class GaussianWeylSymbol:
    """Gaussian Weyl symbol N exp(-(x-mean)^T sigma^-1 (x-mean)/2).

    mean and sigma may be complex (off-diagonal symbols); lognorm holds
    log N.  For off-diagonal symbols only |N| is known, so the imaginary
    part of lognorm is fixed to zero; every consumer uses the modulus.
    """

    mean: np.ndarray
    sigma: np.ndarray
    lognorm: complex

    def __post_init__(self):
        object.__setattr__(self, "mean", _frozen(self.mean, complex))
        object.__setattr__(self, "sigma", _frozen(self.sigma, complex))
        object.__setattr__(self, "lognorm", complex(self.lognorm))

    @property
    def n(self):
        return self.mean.shape[0] // 2

    def is_real(self):
        return (
            np.abs(self.mean.imag).max(initial=0.0) == 0.0
            and np.abs(self.sigma.imag).max(initial=0.0) == 0.0
        )


def diagonal_moments(probes):
    """Weyl symbol of the projector onto a product of single-mode probes."""
    sigma = block_diag(*[p.sigma for p in probes]).astype(complex)
    mean = np.concatenate([p.mean for p in probes]).astype(complex)
    return GaussianWeylSymbol(
        mean=mean, sigma=sigma, lognorm=-len(probes) * math.log(math.pi)
    )


def composite_offdiag_moments(ps):
    """Weyl symbol moments of |Phi2><Phi1| for a probe set.

    Per mode m (probe a = m, probe b = n + m):

        sigma_m = [(Sa + Sb) + i (Sa J1^T Sb - Sb J1^T Sa)] / (2 det(Sa + Sb))

    stacked block-diagonally; the composite mean is
    (X1 + X2)/2 + i sigma J_n (X1 - X2); log|N| accumulates the per-mode
    overlap normalizations.
    """
    n = ps.n
    blocks = []
    lognorm = 0.0
    for m in range(n):
        pa, pb = ps.probes[m], ps.probes[n + m]
        Sa, Sb = pa.sigma, pb.sigma
        S = Sa + Sb
        dS = S[0, 0] * S[1, 1] - S[0, 1] * S[1, 0]
        block = (S + 1j * (Sa @ J1.T @ Sb - Sb @ J1.T @ Sa)) / (2.0 * dS)
        blocks.append(block)
        xm = pa.mean - pb.mean
        jx = J1 @ xm
        lognorm += -(jx @ S @ jx) / (4.0 * dS) - math.log(math.pi) - 0.25 * math.log(dS)
    sigma = block_diag(*blocks)
    J = symplectic_form(n)
    x1, x2 = ps.x_phi1, ps.x_phi2
    mean = 0.5 * (x1 + x2) + 1j * sigma @ J @ (x1 - x2)
    return GaussianWeylSymbol(mean=mean, sigma=sigma, lognorm=lognorm)


def permuted_moments(ps, bipartition):
    """Weyl symbols of the diagonal projectors after swapping probe halves.

    For bipartition vector v, Phi1j keeps probe m where v_m = 0 and takes
    probe n+m where v_m = 1; Phi2j does the opposite.  Equivalently the
    means satisfy X_{1j,2j} = (X1 + X2)/2 +/- P_j (X1 - X2)/2 with shared
    per-mode covariances picked the same way.
    """
    n = ps.n
    if bipartition.n != n:
        raise InvalidBipartitionError("bipartition and probe set mode counts differ")
    idx1 = [m + n * bipartition.v[m] for m in range(n)]
    idx2 = [m + n * (1 - bipartition.v[m]) for m in range(n)]
    sym1 = diagonal_moments([ps.probes[i] for i in idx1])
    sym2 = diagonal_moments([ps.probes[i] for i in idx2])
    return sym1, sym2
